#include "carnot/algebra.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace carnot {

Stratification Stratification::make(std::vector<int> dims) {
  if (dims.empty()) throw std::invalid_argument("stratification: no layers");
  Stratification s;
  s.layer_dims = std::move(dims);
  s.step = static_cast<int>(s.layer_dims.size());
  for (int m = 1; m <= s.step; ++m) {
    int d = s.layer_dims[static_cast<size_t>(m - 1)];
    if (d <= 0) throw std::invalid_argument("stratification: non-positive layer dimension");
    for (int k = 0; k < d; ++k) s.degree.push_back(m);
    s.total_dim += d;
  }
  s.horizontal_dim = s.layer_dims[0];
  return s;
}

int Stratification::layer_start(int m) const {
  int start = 0;
  for (int i = 1; i < m; ++i) start += layer_dims[static_cast<size_t>(i - 1)];
  return start;
}

void StructureConstants::set(int i, int j, int k, const Rational& value) {
  if (i < 0 || j < 0 || k < 0 || i >= dim_ || j >= dim_ || k >= dim_)
    throw std::out_of_range("structure constants: index out of range");
  if (value.is_zero()) return;
  entries_[{i, j, k}] = value;
}

Rational StructureConstants::effective(int i, int j, int k) const {
  auto it = entries_.find({i, j, k});
  if (it != entries_.end()) return it->second;
  it = entries_.find({j, i, k});
  if (it != entries_.end()) return -it->second;
  return Rational(0);
}

std::vector<Rational> StructureConstants::bracket(const std::vector<Rational>& a,
                                                  const std::vector<Rational>& b) const {
  std::vector<Rational> out(static_cast<size_t>(dim_), Rational(0));
  for (const auto& [ijk, c] : entries_) {
    auto [i, j, k] = ijk;
    // use each stored orientation once; fall back to the mirror only when absent
    Rational term = a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)] -
                    a[static_cast<size_t>(j)] * b[static_cast<size_t>(i)];
    if (entries_.count({j, i, k}) != 0) {
      // both orientations stored explicitly; take only this one's half
      term = a[static_cast<size_t>(i)] * b[static_cast<size_t>(j)];
    }
    out[static_cast<size_t>(k)] += c * term;
  }
  return out;
}

namespace {

std::vector<Rational> basis_vector(int dim, int i) {
  std::vector<Rational> v(static_cast<size_t>(dim), Rational(0));
  v[static_cast<size_t>(i)] = Rational(1);
  return v;
}

// rank over Q by Gaussian elimination (destructive)
int rational_rank(std::vector<std::vector<Rational>> rows) {
  if (rows.empty()) return 0;
  size_t cols = rows.front().size();
  int rank = 0;
  size_t row = 0;
  for (size_t col = 0; col < cols && row < rows.size(); ++col) {
    size_t pivot = row;
    while (pivot < rows.size() && rows[pivot][col].is_zero()) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[row], rows[pivot]);
    for (size_t r = row + 1; r < rows.size(); ++r) {
      if (rows[r][col].is_zero()) continue;
      Rational f = rows[r][col] / rows[row][col];
      for (size_t c2 = col; c2 < cols; ++c2) rows[r][c2] -= f * rows[row][c2];
    }
    ++row;
    ++rank;
  }
  return rank;
}

}  // namespace

ValidationReport validate(const CarnotAlgebra& algebra) {
  const auto& strat = algebra.strat;
  const auto& sc = algebra.constants;
  const int n_dim = strat.total_dim;
  ValidationReport report;

  // antisymmetry of the explicit table
  for (const auto& [ijk, c] : sc.entries()) {
    auto [i, j, k] = ijk;
    if (i == j) {
      report.antisymmetry = false;
      report.issues.push_back({"antisymmetry", {i + 1, j + 1, k + 1}, "c[i][i][k] must vanish"});
      continue;
    }
    auto mirror = sc.entries().find({j, i, k});
    if (mirror != sc.entries().end() && !(mirror->second + c).is_zero()) {
      report.antisymmetry = false;
      report.issues.push_back(
          {"antisymmetry", {i + 1, j + 1, k + 1}, "c[i][j][k] != -c[j][i][k]"});
    }
  }

  // grading: c[i][j][k] = 0 unless deg k = deg i + deg j
  for (const auto& [ijk, c] : sc.entries()) {
    auto [i, j, k] = ijk;
    if (strat.degree[static_cast<size_t>(k)] !=
        strat.degree[static_cast<size_t>(i)] + strat.degree[static_cast<size_t>(j)]) {
      report.grading = false;
      report.issues.push_back({"grading",
                               {i + 1, j + 1, k + 1},
                               "nonzero bracket outside layer deg(i)+deg(j)"});
    }
  }

  // Jacobi identity, exact
  if (report.antisymmetry) {
    for (int i = 0; i < n_dim && report.jacobi; ++i) {
      for (int j = i + 1; j < n_dim && report.jacobi; ++j) {
        for (int k = j + 1; k < n_dim && report.jacobi; ++k) {
          auto ei = basis_vector(n_dim, i);
          auto ej = basis_vector(n_dim, j);
          auto ek = basis_vector(n_dim, k);
          auto sum = sc.bracket(ei, sc.bracket(ej, ek));
          auto t2 = sc.bracket(ej, sc.bracket(ek, ei));
          auto t3 = sc.bracket(ek, sc.bracket(ei, ej));
          for (int t = 0; t < n_dim; ++t)
            sum[static_cast<size_t>(t)] += t2[static_cast<size_t>(t)] + t3[static_cast<size_t>(t)];
          for (int t = 0; t < n_dim; ++t) {
            if (!sum[static_cast<size_t>(t)].is_zero()) {
              report.jacobi = false;
              report.issues.push_back(
                  {"jacobi", {i + 1, j + 1, k + 1, t + 1}, "Jacobi sum has nonzero component"});
              break;
            }
          }
        }
      }
    }
  }

  // generation: [V_1, V_{m-1}] spans V_m for m = 2..s
  for (int m = 2; m <= strat.step; ++m) {
    int start = strat.layer_start(m);
    int size = strat.layer_size(m);
    std::vector<std::vector<Rational>> rows;
    for (int j = 0; j < strat.horizontal_dim; ++j) {
      int pstart = strat.layer_start(m - 1);
      for (int k = pstart; k < pstart + strat.layer_size(m - 1); ++k) {
        auto w = sc.bracket(basis_vector(n_dim, j), basis_vector(n_dim, k));
        rows.emplace_back(w.begin() + start, w.begin() + start + size);
      }
    }
    if (rational_rank(std::move(rows)) < size) {
      report.generation = false;
      report.issues.push_back({"generation", {m}, "brackets of V_1 with V_{m-1} do not span V_m"});
    }
  }

  return report;
}

CarnotAlgebra catalog(const std::string& name) {
  auto make = [](const std::string& nm, std::vector<int> dims,
                 const std::vector<std::tuple<int, int, int, Rational>>& brackets) {
    CarnotAlgebra a{nm, Stratification::make(std::move(dims)),
                    StructureConstants(0)};
    a.constants = StructureConstants(a.strat.total_dim);
    for (const auto& [i, j, k, c] : brackets) a.constants.set(i, j, k, c);
    return a;
  };

  if (name.rfind("heisenberg(", 0) == 0 && name.back() == ')') {
    int m = std::stoi(name.substr(11, name.size() - 12));
    if (m < 1) throw std::invalid_argument("heisenberg(m) needs m >= 1");
    int n_dim = 2 * m + 1;
    std::vector<std::tuple<int, int, int, Rational>> brackets;
    for (int i = 0; i < m; ++i) brackets.push_back({i, m + i, n_dim - 1, Rational(1)});
    return make(name, {2 * m, 1}, brackets);
  }
  if (name == "heisenberg") return catalog("heisenberg(1)");
  if (name == "engel") {
    return make(name, {2, 1, 1}, {{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(1)}});
  }
  if (name == "free_nilpotent(2,3)") {
    // Hall basis {X1, X2, [X1,X2], [X1,[X1,X2]], [X2,[X1,X2]]}
    return make(name, {2, 1, 2},
                {{0, 1, 2, Rational(1)}, {0, 2, 3, Rational(1)}, {1, 2, 4, Rational(1)}});
  }
  throw std::invalid_argument("unknown catalog algebra: " + name);
}

CarnotAlgebra abelian_algebra(int n) {
  CarnotAlgebra a{"abelian(" + std::to_string(n) + ")", Stratification::make({n}),
                  StructureConstants(n)};
  return a;
}

CarnotAlgebra load_algebra_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open algebra file: " + path);
  nlohmann::json j;
  in >> j;
  if (!j.contains("layer_dims")) throw std::invalid_argument("algebra file: missing layer_dims");
  std::vector<int> dims = j["layer_dims"].get<std::vector<int>>();
  CarnotAlgebra a{j.value("name", path), Stratification::make(dims),
                  StructureConstants(0)};
  a.constants = StructureConstants(a.strat.total_dim);
  if (j.contains("brackets")) {
    for (const auto& row : j["brackets"]) {
      if (!row.is_array() || row.size() != 5)
        throw std::invalid_argument("algebra file: bracket rows are [i, j, k, num, den]");
      int i = row[0].get<int>(), jj = row[1].get<int>(), k = row[2].get<int>();
      long long num = row[3].get<long long>(), den = row[4].get<long long>();
      a.constants.set(i - 1, jj - 1, k - 1, Rational(num, den));
    }
  }
  return a;
}

}  // namespace carnot
