#include "gqm/field_io.hpp"

#include "gqm/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace gqm {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& token, int line) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ValidationError("field file line " + std::to_string(line) + ": bad number '" + token + "'");
  }
  return v;
}

int parse_int(const std::string& token, int line) {
  int v = 0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ValidationError("field file line " + std::to_string(line) + ": bad integer '" + token + "'");
  }
  return v;
}

double node(double lo, double hi, int n, int i) {
  return n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
}

// Index and weight of the lower node for linear interpolation on a closed grid.
std::pair<int, double> locate(double lo, double hi, int n, double v) {
  if (n == 1) return {0, 0.0};
  const double s = std::clamp((v - lo) / (hi - lo) * (n - 1), 0.0, static_cast<double>(n - 1));
  const int i = std::min(static_cast<int>(std::floor(s)), n - 2);
  return {i, s - i};
}

}  // namespace

void TabulatedField::validate() const {
  if (dim < 1) throw ValidationError("tabulated field: dim must be positive");
  if (n_t < 1 || n_x < 2) throw ValidationError("tabulated field: need n_t >= 1 and n_x >= 2");
  if (n_t == 1 && t_min != t_max) throw ValidationError("tabulated field: n_t = 1 requires t_min = t_max");
  if (n_t > 1 && !(t_max > t_min)) throw ValidationError("tabulated field: t_max must exceed t_min");
  if (!(x_max > x_min)) throw ValidationError("tabulated field: x_max must exceed x_min");
  const std::size_t count = static_cast<std::size_t>(n_t) * n_x;
  if (phi.size() != count || a.size() != count) throw ValidationError("tabulated field: sample count mismatch");
  for (std::size_t k = 0; k < count; ++k) {
    for (const Matrix* m : {&phi[k], &a[k]}) {
      if (m->rows() != dim || m->cols() != dim) throw ValidationError("tabulated field: sample shape mismatch");
      if ((*m + m->adjoint()).cwiseAbs().maxCoeff() > kAntiHermitianProjectTol * std::max(1.0, m->cwiseAbs().maxCoeff())) {
        throw ValidationError("tabulated field: sample is not anti-Hermitian");
      }
    }
  }
}

TabulatedField TabulatedField::sample(const GaugeField1D& field, double t_min, double t_max,
                                      int n_t, double x_min, double x_max, int n_x) {
  TabulatedField table;
  table.dim = field.dim();
  table.t_min = t_min;
  table.t_max = t_max;
  table.n_t = n_t;
  table.x_min = x_min;
  table.x_max = x_max;
  table.n_x = n_x;
  for (int it = 0; it < n_t; ++it) {
    for (int ix = 0; ix < n_x; ++ix) {
      const double t = node(t_min, t_max, n_t, it);
      const double x = node(x_min, x_max, n_x, ix);
      table.phi.push_back(field.phi(t, x).matrix());
      table.a.push_back(field.a(t, x).matrix());
    }
  }
  table.validate();
  return table;
}

GaugeField1D TabulatedField::to_field() const {
  validate();
  auto table = std::make_shared<const TabulatedField>(*this);
  auto interpolate = [table](const std::vector<Matrix>& samples, double t, double x) {
    const auto [it, wt] = locate(table->t_min, table->t_max, table->n_t, t);
    const auto [ix, wx] = locate(table->x_min, table->x_max, table->n_x, x);
    auto at = [&](int i, int j) -> const Matrix& {
      return samples[static_cast<std::size_t>(i) * table->n_x + j];
    };
    Matrix v = (1.0 - wx) * at(it, ix) + wx * at(it, ix + 1);
    if (table->n_t > 1) {
      v = (1.0 - wt) * v + wt * ((1.0 - wx) * at(it + 1, ix) + wx * at(it + 1, ix + 1));
    }
    return AlgebraElement(std::move(v));
  };
  GaugeField1D::Traits traits;
  traits.time_independent = n_t == 1;
  traits.no_vector_potential =
      std::all_of(a.begin(), a.end(), [](const Matrix& m) { return m.cwiseAbs().maxCoeff() == 0.0; });
  return GaugeField1D(
      dim, [table, interpolate](double t, double x) { return interpolate(table->phi, t, x); },
      [table, interpolate](double t, double x) { return interpolate(table->a, t, x); }, traits);
}

void write_tabulated_field(std::ostream& os, const TabulatedField& table) {
  table.validate();
  os << "gqm-field-1d v1\n";
  os << "dim " << table.dim << "\n";
  os << "t " << format_double(table.t_min) << " " << format_double(table.t_max) << " " << table.n_t << "\n";
  os << "x " << format_double(table.x_min) << " " << format_double(table.x_max) << " " << table.n_x << "\n";
  auto emit = [&](const char* name, const std::vector<Matrix>& samples) {
    for (int it = 0; it < table.n_t; ++it) {
      for (int ix = 0; ix < table.n_x; ++ix) {
        const Matrix& m = samples[static_cast<std::size_t>(it) * table.n_x + ix];
        os << name << " " << it << " " << ix;
        for (int r = 0; r < table.dim; ++r) {
          for (int c = 0; c < table.dim; ++c) {
            os << " " << format_double(m(r, c).real()) << " " << format_double(m(r, c).imag());
          }
        }
        os << "\n";
      }
    }
  };
  emit("phi", table.phi);
  emit("a", table.a);
}

TabulatedField read_tabulated_field(std::istream& is) {
  TabulatedField table;
  std::string line;
  int line_no = 0;
  bool have_magic = false, have_dim = false, have_t = false, have_x = false;
  std::vector<bool> seen_phi, seen_a;
  auto tokens_of = [](const std::string& s) {
    std::istringstream ss(s);
    std::vector<std::string> out;
    for (std::string tok; ss >> tok;) out.push_back(tok);
    return out;
  };
  auto allocate = [&]() {
    const std::size_t count = static_cast<std::size_t>(table.n_t) * table.n_x;
    table.phi.assign(count, Matrix::Zero(table.dim, table.dim));
    table.a.assign(count, Matrix::Zero(table.dim, table.dim));
    seen_phi.assign(count, false);
    seen_a.assign(count, false);
  };
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tok = tokens_of(line);
    if (tok.empty()) continue;
    auto fail = [&](const std::string& msg) {
      throw ValidationError("field file line " + std::to_string(line_no) + ": " + msg);
    };
    if (!have_magic) {
      if (tok.size() != 2 || tok[0] != "gqm-field-1d" || tok[1] != "v1") fail("expected 'gqm-field-1d v1'");
      have_magic = true;
    } else if (tok[0] == "dim") {
      if (tok.size() != 2) fail("expected 'dim <N>'");
      table.dim = parse_int(tok[1], line_no);
      have_dim = true;
    } else if (tok[0] == "t") {
      if (tok.size() != 4) fail("expected 't <min> <max> <count>'");
      table.t_min = parse_double(tok[1], line_no);
      table.t_max = parse_double(tok[2], line_no);
      table.n_t = parse_int(tok[3], line_no);
      have_t = true;
    } else if (tok[0] == "x") {
      if (tok.size() != 4) fail("expected 'x <min> <max> <count>'");
      table.x_min = parse_double(tok[1], line_no);
      table.x_max = parse_double(tok[2], line_no);
      table.n_x = parse_int(tok[3], line_no);
      have_x = true;
    } else if (tok[0] == "phi" || tok[0] == "a") {
      if (!(have_dim && have_t && have_x)) fail("sample before header is complete");
      if (table.dim < 1 || table.n_t < 1 || table.n_x < 2) fail("invalid header values");
      if (seen_phi.empty()) allocate();
      const std::size_t expected = 3 + 2 * static_cast<std::size_t>(table.dim) * table.dim;
      if (tok.size() != expected) fail("expected " + std::to_string(expected - 3) + " matrix numbers");
      const int it = parse_int(tok[1], line_no);
      const int ix = parse_int(tok[2], line_no);
      if (it < 0 || it >= table.n_t || ix < 0 || ix >= table.n_x) fail("sample index out of range");
      const std::size_t k = static_cast<std::size_t>(it) * table.n_x + ix;
      auto& seen = tok[0] == "phi" ? seen_phi : seen_a;
      if (seen[k]) fail("duplicate sample");
      seen[k] = true;
      Matrix& m = tok[0] == "phi" ? table.phi[k] : table.a[k];
      std::size_t p = 3;
      for (int r = 0; r < table.dim; ++r) {
        for (int c = 0; c < table.dim; ++c) {
          const double re = parse_double(tok[p++], line_no);
          const double im = parse_double(tok[p++], line_no);
          m(r, c) = Complex(re, im);
        }
      }
    } else {
      fail("unknown record '" + tok[0] + "'");
    }
  }
  if (!have_magic) throw ValidationError("field file: missing 'gqm-field-1d v1' header");
  if (!(have_dim && have_t && have_x)) throw ValidationError("field file: incomplete header");
  if (seen_phi.empty()) allocate();
  const bool complete = std::all_of(seen_phi.begin(), seen_phi.end(), [](bool b) { return b; }) &&
                        std::all_of(seen_a.begin(), seen_a.end(), [](bool b) { return b; });
  if (!complete) throw ValidationError("field file: missing samples");
  table.validate();
  return table;
}

void save_tabulated_field(const std::filesystem::path& path, const TabulatedField& table) {
  std::ofstream os(path);
  if (!os) throw ValidationError("cannot open " + path.string() + " for writing");
  write_tabulated_field(os, table);
}

TabulatedField load_tabulated_field(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open field file " + path.string());
  return read_tabulated_field(is);
}

}  // namespace gqm
