#include "gffpin/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gffpin/common.hpp"
#include "gffpin/rng.hpp"

namespace gffpin {

namespace {

void check_beta(const DisorderSpec& spec, double beta) {
  if (!std::isfinite(beta) || std::abs(beta) > 2.0 * spec.beta_bar)
    throw DomainError("disorder: beta outside the domain of lambda");
}

// Tilted weights p_j exp(beta v_j) normalised, computed with a max shift.
std::vector<double> tilted_probs(const DisorderSpec& spec, double beta) {
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : spec.values) mx = std::max(mx, beta * v);
  std::vector<double> w(spec.values.size());
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    w[j] = spec.probs[j] * std::exp(beta * spec.values[j] - mx);
    s += w[j];
  }
  for (double& x : w) x /= s;
  return w;
}

double draw_tabulated(const std::vector<double>& values, const std::vector<double>& probs,
                      double u) {
  double c = 0.0;
  for (std::size_t j = 0; j + 1 < values.size(); ++j) {
    c += probs[j];
    if (u < c) return values[j];
  }
  return values.back();
}

}  // namespace

DisorderSpec DisorderSpec::gaussian() { return {}; }

DisorderSpec DisorderSpec::bernoulli() {
  DisorderSpec s;
  s.kind = DisorderKind::Bernoulli;
  return s;
}

DisorderSpec DisorderSpec::tabulated(std::vector<double> values, std::vector<double> probs) {
  if (values.empty() || values.size() != probs.size())
    throw ConfigError("tabulated disorder: values and probs must have equal nonzero length");
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("tabulated disorder: bad probability");
    total += p;
  }
  if (!(total > 0.0)) throw ConfigError("tabulated disorder: probabilities sum to zero");
  for (double& p : probs) p /= total;
  DisorderSpec s;
  s.kind = DisorderKind::Tabulated;
  s.values = std::move(values);
  s.probs = std::move(probs);
  const double mu = s.mean();
  double scale = 0.0;
  for (double v : s.values) scale = std::max(scale, std::abs(v));
  if (std::abs(mu) > 1e-12 * std::max(1.0, scale))
    throw ConfigError("tabulated disorder: law must be centred");
  if (!(s.variance() > 0.0)) throw ConfigError("tabulated disorder: zero variance");
  return s;
}

std::string DisorderSpec::name() const {
  switch (kind) {
    case DisorderKind::Gaussian: return "gaussian";
    case DisorderKind::Bernoulli: return "bernoulli";
    default: return "tabulated";
  }
}

double DisorderSpec::mean() const {
  if (kind != DisorderKind::Tabulated) return 0.0;
  double m = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) m += probs[j] * values[j];
  return m;
}

double DisorderSpec::variance() const {
  if (kind != DisorderKind::Tabulated) return 1.0;
  const double mu = mean();
  double v = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j)
    v += probs[j] * (values[j] - mu) * (values[j] - mu);
  return v;
}

DisorderKind parse_disorder_kind(const std::string& s) {
  if (s == "gaussian") return DisorderKind::Gaussian;
  if (s == "bernoulli") return DisorderKind::Bernoulli;
  if (s == "tabulated") return DisorderKind::Tabulated;
  throw ConfigError("unknown disorder kind: " + s);
}

double log_mgf(const DisorderSpec& spec, double beta) {
  check_beta(spec, beta);
  switch (spec.kind) {
    case DisorderKind::Gaussian: return 0.5 * beta * beta;
    case DisorderKind::Bernoulli: {
      // log cosh without overflow
      const double a = std::abs(beta);
      return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
    }
    default: {
      double mx = -std::numeric_limits<double>::infinity();
      for (double v : spec.values) mx = std::max(mx, beta * v);
      double s = 0.0;
      for (std::size_t j = 0; j < spec.values.size(); ++j)
        s += spec.probs[j] * std::exp(beta * spec.values[j] - mx);
      return mx + std::log(s);
    }
  }
}

double log_mgf_d1(const DisorderSpec& spec, double beta) {
  check_beta(spec, beta);
  switch (spec.kind) {
    case DisorderKind::Gaussian: return beta;
    case DisorderKind::Bernoulli: return std::tanh(beta);
    default: {
      const auto w = tilted_probs(spec, beta);
      double m = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) m += w[j] * spec.values[j];
      return m;
    }
  }
}

double log_mgf_d2(const DisorderSpec& spec, double beta) {
  check_beta(spec, beta);
  switch (spec.kind) {
    case DisorderKind::Gaussian: return 1.0;
    case DisorderKind::Bernoulli: {
      const double c = std::cosh(beta);
      return 1.0 / (c * c);
    }
    default: {
      const auto w = tilted_probs(spec, beta);
      double m = 0.0, m2 = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) {
        m += w[j] * spec.values[j];
        m2 += w[j] * spec.values[j] * spec.values[j];
      }
      return m2 - m * m;
    }
  }
}

double chi(const DisorderSpec& spec, double beta) {
  return log_mgf(spec, 2.0 * beta) - 2.0 * log_mgf(spec, beta);
}

DisorderField sample_disorder(const BoxGeometry& g, const DisorderSpec& spec,
                              std::uint64_t seed) {
  DisorderField f;
  f.N = g.N();
  f.seed = seed;
  f.spec = spec;
  f.omega.assign(g.size(), 0.0);
  const std::uint64_t key = derive_key(seed, "disorder");
  for (int idx : g.tilde_sites()) {
    const Site s = g.site(idx);
    // Stream id depends on the coordinates only.
    Rng rng(key, (static_cast<std::uint64_t>(s.x1) << 32) | static_cast<std::uint32_t>(s.x2));
    switch (spec.kind) {
      case DisorderKind::Gaussian: f.omega[idx] = rng.normal(); break;
      case DisorderKind::Bernoulli: f.omega[idx] = rng.uniform() < 0.5 ? -1.0 : 1.0; break;
      default: f.omega[idx] = draw_tabulated(spec.values, spec.probs, rng.uniform());
    }
  }
  return f;
}

DisorderField constant_disorder(const BoxGeometry& g, double value) {
  DisorderField f;
  f.N = g.N();
  f.omega.assign(g.size(), 0.0);
  for (int idx : g.tilde_sites()) f.omega[idx] = value;
  return f;
}

DisorderField tilted_resample(const BoxGeometry& g, const DisorderField& omega,
                              const std::vector<char>& contacts, double beta,
                              std::uint64_t seed) {
  if (omega.omega.size() != g.size() || contacts.size() != g.size())
    throw ContractError("tilted_resample: size mismatch");
  check_beta(omega.spec, beta);
  DisorderField out = omega;
  const std::uint64_t key = derive_key(seed, "tilted-disorder");
  std::vector<double> w;
  if (omega.spec.kind == DisorderKind::Tabulated) w = tilted_probs(omega.spec, beta);
  const double p_plus = 1.0 / (1.0 + std::exp(-2.0 * beta));
  for (int idx : g.tilde_sites()) {
    if (!contacts[idx]) continue;
    Rng rng(key, static_cast<std::uint64_t>(idx));
    switch (omega.spec.kind) {
      case DisorderKind::Gaussian: out.omega[idx] = beta + rng.normal(); break;
      case DisorderKind::Bernoulli: out.omega[idx] = rng.uniform() < p_plus ? 1.0 : -1.0; break;
      default: out.omega[idx] = draw_tabulated(omega.spec.values, w, rng.uniform());
    }
  }
  return out;
}

CellEventParams default_E_params(const DisorderSpec& spec, double beta, int N1) {
  const double L = std::log(static_cast<double>(N1));
  return {static_cast<int>(std::floor(L * L)), 0.5 * log_mgf_d1(spec, beta) * L * L * L};
}

CellEventParams default_C_params(int N1) {
  const double L = std::log(static_cast<double>(N1));
  return {static_cast<int>(std::floor(L * L)), L * L * L};
}

std::int64_t max_window_size(const SubBox& cell, int radius) {
  if (cell.empty()) return 0;
  // The ball centred nearest the middle of the cell is the largest.
  const int c1 = (cell.lo1 + cell.hi1) / 2, c2 = (cell.lo2 + cell.hi2) / 2;
  std::int64_t n = 0;
  for (int d2 = -radius; d2 <= radius; ++d2) {
    const int y = c2 + d2;
    if (y < cell.lo2 || y > cell.hi2) continue;
    const int w = radius - std::abs(d2);
    n += std::min(cell.hi1, c1 + w) - std::max(cell.lo1, c1 - w) + 1;
  }
  return n;
}

double max_window_sum(const BoxGeometry& g, const std::vector<double>& values,
                      const SubBox& cell, int radius) {
  if (values.size() != g.size()) throw ContractError("max_window_sum: size mismatch");
  if (cell.empty()) return 0.0;
  const int w1 = cell.hi1 - cell.lo1 + 1;
  const int w2 = cell.hi2 - cell.lo2 + 1;
  // Row prefix sums restricted to the cell.
  std::vector<double> pre(static_cast<std::size_t>(w2) * (w1 + 1), 0.0);
  for (int r = 0; r < w2; ++r)
    for (int c = 0; c < w1; ++c)
      pre[r * (w1 + 1) + c + 1] =
          pre[r * (w1 + 1) + c] + values[g.index(cell.lo1 + c, cell.lo2 + r)];
  double best = -std::numeric_limits<double>::infinity();
  for (int r = 0; r < w2; ++r) {
    for (int c = 0; c < w1; ++c) {
      double s = 0.0;
      for (int d = -radius; d <= radius; ++d) {
        const int rr = r + d;
        if (rr < 0 || rr >= w2) continue;
        const int w = radius - std::abs(d);
        const int lo = std::max(0, c - w), hi = std::min(w1 - 1, c + w);
        s += pre[rr * (w1 + 1) + hi + 1] - pre[rr * (w1 + 1) + lo];
      }
      best = std::max(best, s);
    }
  }
  return best;
}

CellEvent event_E_cell(const BoxGeometry& g, const DisorderField& omega,
                       const SubBox& cell, const CellEventParams& p) {
  CellEvent e;
  e.max_sum = max_window_sum(g, omega.omega, cell, p.radius);
  e.value = e.max_sum >= p.threshold;
  return e;
}

CellEvent event_C_cell(const BoxGeometry& g, const std::vector<char>& contacts,
                       const SubBox& cell, const CellEventParams& p) {
  if (contacts.size() != g.size()) throw ContractError("event_C_cell: size mismatch");
  CellEvent e;
  e.structurally_false = static_cast<double>(max_window_size(cell, p.radius)) < p.threshold;
  std::vector<double> v(contacts.begin(), contacts.end());
  e.max_sum = max_window_sum(g, v, cell, p.radius);
  e.value = e.max_sum >= p.threshold;
  return e;
}

Penalty penalty_f(const BoxGeometry& g, const DisorderField& omega,
                  const CellTiling& tiling, const CellEventParams& p) {
  Penalty out;
  out.per_cell.assign(tiling.cells.size(), 0);
  for (std::size_t c = 0; c < tiling.cells.size(); ++c) {
    if (event_E_cell(g, omega, tiling.cells[c].cell, p).value) {
      out.per_cell[c] = 1;
      ++out.triggered;
    }
  }
  out.value = std::exp(-2.0 * out.triggered);
  return out;
}

}  // namespace gffpin
