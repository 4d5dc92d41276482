#include "qwalk/transfer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qwalk/kernels.hpp"

namespace qwalk {
namespace {

constexpr double kInvPhi = 0.6180339887498949;  // 1/golden ratio
constexpr double kRefineFloor = 0.5;            // local maxima below this are not refined

void check_vertex(std::size_t n, std::size_t v) {
  if (v >= n) throw std::invalid_argument("state vertex " + std::to_string(v) + " out of range");
}

/// y^T U(t) x as a sum of phases over the distinct eigenvalues.
class AmplitudeSeries {
 public:
  AmplitudeSeries(const SpectralDecomposition& d, const PureState& x, const PureState& y)
      : theta_(d.eigenvalues().begin(), d.eigenvalues().end()),
        coeff_(projected_overlaps(d, x.vector(), y.vector())) {}

  std::complex<double> at(double t) const {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t j = 0; j < theta_.size(); ++j) {
      re += coeff_[j] * std::cos(t * theta_[j]);
      im += coeff_[j] * std::sin(t * theta_[j]);
    }
    return {re, im};
  }

  double magnitude(double t) const { return std::abs(at(t)); }

  /// |amplitude| at t0 + s*dt for s < count.
  std::vector<double> sample(double t0, double dt, std::size_t count) const {
    std::vector<double> re(count), im(count), out(count);
    kernels::active().phase_sum(coeff_.data(), theta_.data(), theta_.size(), t0, dt, count,
                                re.data(), im.data());
    for (std::size_t s = 0; s < count; ++s) out[s] = std::hypot(re[s], im[s]);
    return out;
  }

  bool vanishes() const {
    return std::all_of(coeff_.begin(), coeff_.end(), [](double c) { return std::abs(c) < 1e-14; });
  }

 private:
  std::vector<double> theta_;
  std::vector<double> coeff_;
};

template <class F>
TimePoint golden_section(F&& f, double lo, double hi, int iters, bool maximise) {
  auto better = [&](double a, double b) { return maximise ? a > b : a < b; };
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (better(f1, f2)) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return better(f1, f2) ? TimePoint{x1, f1} : TimePoint{x2, f2};
}

struct Grid {
  double step;
  std::size_t points;  // including t = 0
};

Grid make_grid(const SpectralDecomposition& d, double t_max, double grid_step) {
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  const double requested = grid_step > 0.0 ? grid_step : default_grid_step(d, t_max);
  const auto intervals = static_cast<std::size_t>(std::ceil(t_max / requested));
  return {t_max / static_cast<double>(std::max<std::size_t>(intervals, 1)),
          std::max<std::size_t>(intervals, 1) + 1};
}

bool parallel_states(const PureState& x, const PureState& y) {
  return std::abs(kernels::dot(x.vector(), y.vector())) >= 1.0 - 1e-12;
}

std::vector<std::vector<double>> project_all(const SpectralDecomposition& d,
                                             std::span<const double> x) {
  std::vector<std::vector<double>> out;
  out.reserve(d.distinct());
  for (const Matrix& f : d.projectors()) out.push_back(f * x);
  return out;
}

double norm(std::span<const double> v) { return std::sqrt(kernels::dot(v, v)); }

bool cospectral_projections(const std::vector<std::vector<double>>& fx,
                            const std::vector<std::vector<double>>& fy, double tol) {
  for (std::size_t j = 0; j < fx.size(); ++j) {
    const double nx = norm(fx[j]);
    const double ny = norm(fy[j]);
    if ((nx > tol) != (ny > tol)) return false;
    if (nx <= tol) continue;
    double minus = 0.0;
    double plus = 0.0;
    for (std::size_t i = 0; i < fx[j].size(); ++i) {
      minus += (fx[j][i] - fy[j][i]) * (fx[j][i] - fy[j][i]);
      plus += (fx[j][i] + fy[j][i]) * (fx[j][i] + fy[j][i]);
    }
    if (std::min(std::sqrt(minus), std::sqrt(plus)) > tol) return false;
  }
  return true;
}

}  // namespace

PureState PureState::vertex(std::size_t n, std::size_t a) {
  check_vertex(n, a);
  std::vector<double> v(n, 0.0);
  v[a] = 1.0;
  return {std::move(v), StateKind::Vertex, a, a, 0.0};
}

PureState PureState::pair(std::size_t n, std::size_t a, std::size_t b) {
  PureState p = s_pair(n, a, b, -1.0);
  p.kind_ = StateKind::Pair;
  return p;
}

PureState PureState::plus(std::size_t n, std::size_t a, std::size_t b) {
  PureState p = s_pair(n, a, b, 1.0);
  p.kind_ = StateKind::Plus;
  return p;
}

PureState PureState::s_pair(std::size_t n, std::size_t a, std::size_t b, double s) {
  check_vertex(n, a);
  check_vertex(n, b);
  if (a == b) throw std::invalid_argument("s-pair state needs two distinct vertices");
  if (s == 0.0 || !std::isfinite(s)) throw std::invalid_argument("s-pair state needs s != 0");
  std::vector<double> v(n, 0.0);
  const double scale = 1.0 / std::sqrt(1.0 + s * s);
  v[a] = scale;
  v[b] = s * scale;
  return {std::move(v), StateKind::SPair, a, b, s};
}

PureState PureState::raw(std::vector<double> v) {
  const double nv = norm(v);
  if (!(nv > 0.0)) throw std::invalid_argument("raw state must be nonzero");
  for (double& c : v) c /= nv;
  return {std::move(v), StateKind::Raw, 0, 0, 0.0};
}

std::string PureState::label() const {
  std::ostringstream os;
  switch (kind_) {
    case StateKind::Vertex: os << "v:" << a_; break;
    case StateKind::Pair: os << "pair:" << a_ << ',' << b_; break;
    case StateKind::Plus: os << "plus:" << a_ << ',' << b_; break;
    case StateKind::SPair: os << "spair:" << a_ << ',' << b_ << ':' << s_; break;
    case StateKind::Raw: {
      os.precision(17);
      os << "raw:";
      for (std::size_t i = 0; i < vec_.size(); ++i) os << (i ? "," : "") << vec_[i];
      break;
    }
  }
  return os.str();
}

namespace {

std::size_t parse_index(std::string_view s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw std::invalid_argument("bad vertex index '" + std::string(s) + "'");
  return v;
}

double parse_real(std::string_view s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + std::string(s) + "'");
  }
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i)
    if (i == s.size() || s[i] == sep) {
      parts.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  return parts;
}

}  // namespace

PureState parse_state(std::string_view spec, std::size_t n) {
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos)
    throw std::invalid_argument("state '" + std::string(spec) + "' needs a kind prefix");
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view rest = spec.substr(colon + 1);
  if (kind == "v") return PureState::vertex(n, parse_index(rest));
  if (kind == "raw") {
    std::string_view body = rest;
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    std::vector<double> v;
    for (auto part : split(body, ',')) v.push_back(parse_real(part));
    if (v.size() != n) throw std::invalid_argument("raw state has wrong dimension");
    return PureState::raw(std::move(v));
  }
  const auto fields = split(rest, ':');
  const auto ab = split(fields[0], ',');
  if (ab.size() != 2) throw std::invalid_argument("state '" + std::string(spec) + "' needs a,b");
  const std::size_t a = parse_index(ab[0]);
  const std::size_t b = parse_index(ab[1]);
  if (kind == "pair" && fields.size() == 1) return PureState::pair(n, a, b);
  if (kind == "plus" && fields.size() == 1) return PureState::plus(n, a, b);
  if (kind == "spair" && fields.size() == 2) return PureState::s_pair(n, a, b, parse_real(fields[1]));
  throw std::invalid_argument("unrecognised state '" + std::string(spec) + "'");
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::PST: return "PST";
    case Verdict::NoPstAtTime: return "NO_PST_AT_TIME";
    case Verdict::Periodic: return "PERIODIC";
    case Verdict::NotStronglyCospectral: return "NOT_STRONGLY_COSPECTRAL";
    case Verdict::FixedState: return "FIXED_STATE";
  }
  return "?";
}

std::complex<double> amplitude(const SpectralDecomposition& d, const PureState& x,
                               const PureState& y, double t) {
  if (x.dimension() != y.dimension() || x.dimension() != d.order())
    throw std::invalid_argument("amplitude: state dimension mismatch");
  return AmplitudeSeries(d, x, y).at(t);
}

double fidelity(const SpectralDecomposition& d, const PureState& x, const PureState& y,
                double t) {
  return std::abs(amplitude(d, x, y, t));
}

bool is_strongly_cospectral(const SpectralDecomposition& d, const PureState& x,
                            const PureState& y, double tol) {
  if (x.dimension() != d.order() || y.dimension() != d.order())
    throw std::invalid_argument("strong cospectrality: state dimension mismatch");
  if (parallel_states(x, y))
    throw std::invalid_argument("strong cospectrality needs linearly independent states");
  return cospectral_projections(project_all(d, x.vector()), project_all(d, y.vector()), tol);
}

TransferReport detect_pst(const SpectralDecomposition& d, const PureState& x,
                          const PureState& y, double t, double pst_tol) {
  TransferReport r;
  r.time = t;
  const std::complex<double> amp = amplitude(d, x, y, t);
  r.fidelity = std::abs(amp);
  r.residual = 1.0 - r.fidelity;
  if (r.fidelity > 0.0) r.phase = amp / r.fidelity;

  const bool parallel = parallel_states(x, y);
  r.strongly_cospectral = parallel || is_strongly_cospectral(d, x, y);
  if (r.fidelity >= 1.0 - pst_tol) {
    r.verdict = parallel ? Verdict::Periodic : Verdict::PST;
  } else if (!parallel && is_fixed_state(d, x.vector())) {
    r.verdict = Verdict::FixedState;
  } else if (!r.strongly_cospectral) {
    r.verdict = Verdict::NotStronglyCospectral;
  } else {
    r.verdict = Verdict::NoPstAtTime;
  }
  return r;
}

bool is_periodic_at(const SpectralDecomposition& d, const PureState& x, double t, double tol) {
  return fidelity(d, x, x, t) >= 1.0 - tol;
}

double default_grid_step(const SpectralDecomposition& d, double t_max) {
  const double diameter = d.spectral_diameter();
  if (diameter <= 0.0) return t_max / 64.0;
  return std::numbers::pi / (64.0 * diameter);
}

std::vector<TimePoint> search_pst(const SpectralDecomposition& d, const PureState& x,
                                  const PureState& y, double t_max, const SearchOptions& opts) {
  const AmplitudeSeries series(d, x, y);
  std::vector<TimePoint> found;
  if (series.vanishes()) return found;
  const Grid grid = make_grid(d, t_max, opts.grid_step);
  const std::vector<double> f = series.sample(0.0, grid.step, grid.points);
  auto mag = [&](double t) { return series.magnitude(t); };

  for (std::size_t s = 1; s < grid.points; ++s) {
    const bool last = s + 1 == grid.points;
    if (!(f[s] > f[s - 1]) || (!last && f[s] < f[s + 1])) continue;
    if (f[s] < kRefineFloor) continue;
    const double lo = grid.step * static_cast<double>(s - 1);
    const double hi = last ? t_max : grid.step * static_cast<double>(s + 1);
    TimePoint p = golden_section(mag, lo, hi, opts.refine_iters, true);
    if (f[s] > p.fidelity) p = {grid.step * static_cast<double>(s), f[s]};
    if (p.fidelity < 1.0 - opts.pst_tol) continue;
    if (!found.empty() && p.time - found.back().time < grid.step) {
      if (p.fidelity > found.back().fidelity) found.back() = p;
      continue;
    }
    found.push_back(p);
  }
  return found;
}

double sedentariness_estimate(const SpectralDecomposition& d, const PureState& x, double t_max,
                              double grid_step) {
  const AmplitudeSeries series(d, x, x);
  const Grid grid = make_grid(d, t_max, grid_step);
  const std::vector<double> f = series.sample(0.0, grid.step, grid.points);
  auto mag = [&](double t) { return series.magnitude(t); };
  double best = *std::min_element(f.begin() + 1, f.end());
  for (std::size_t s = 1; s + 1 < grid.points; ++s) {
    if (!(f[s] < f[s - 1]) || f[s] > f[s + 1]) continue;
    const double lo = grid.step * static_cast<double>(s - 1);
    const double hi = grid.step * static_cast<double>(s + 1);
    best = std::min(best, golden_section(mag, lo, hi, 60, false).fidelity);
  }
  return best;
}

PgstScan pgst_heuristic(const SpectralDecomposition& d, const PureState& x, const PureState& y,
                        double t_max, double target, double grid_step) {
  const AmplitudeSeries series(d, x, y);
  const Grid grid = make_grid(d, t_max, grid_step);
  auto mag = [&](double t) { return series.magnitude(t); };
  PgstScan scan;

  // Sample in chunks so an early target hit does not pay for the whole horizon.
  constexpr std::size_t kChunk = 4096;
  double prev2 = -1.0;
  double prev = series.magnitude(0.0);
  for (std::size_t base = 1; base < grid.points; base += kChunk) {
    const std::size_t count = std::min(kChunk, grid.points - base);
    const std::vector<double> f =
        series.sample(grid.step * static_cast<double>(base), grid.step, count);
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t s = base + i;
      // prev is a local maximum at index s-1 when prev2 < prev >= f[i].
      if (s >= 2 && prev > prev2 && prev >= f[i] && prev > scan.best.fidelity) {
        const double lo = grid.step * static_cast<double>(s - 2);
        const double hi = grid.step * static_cast<double>(s);
        TimePoint p = golden_section(mag, lo, hi, 60, true);
        if (prev > p.fidelity) p = {grid.step * static_cast<double>(s - 1), prev};
        if (p.fidelity > scan.best.fidelity) {
          scan.best = p;
          scan.records.push_back(p);
          if (p.fidelity >= target) return scan;
        }
      }
      prev2 = prev;
      prev = f[i];
    }
  }
  if (prev > scan.best.fidelity) {
    scan.best = {t_max, prev};
    scan.records.push_back(scan.best);
  }
  return scan;
}

std::vector<TimePoint> fidelity_curve(const SpectralDecomposition& d, const PureState& x,
                                      const PureState& y, double t_max, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("fidelity curve needs at least two samples");
  if (!(t_max > 0.0)) throw std::invalid_argument("t_max must be positive");
  const AmplitudeSeries series(d, x, y);
  const double dt = t_max / static_cast<double>(samples - 1);
  const std::vector<double> f = series.sample(0.0, dt, samples);
  std::vector<TimePoint> out(samples);
  for (std::size_t s = 0; s < samples; ++s) out[s] = {dt * static_cast<double>(s), f[s]};
  return out;
}

std::vector<PairTransfer> find_pair_pst(const SpectralDecomposition& d, double t_max,
                                        const SearchOptions& opts) {
  const std::size_t n = d.order();
  std::vector<PureState> states;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = k + 1; l < n; ++l) states.push_back(PureState::pair(n, k, l));
  std::vector<std::vector<std::vector<double>>> proj;
  proj.reserve(states.size());
  for (const auto& s : states) proj.push_back(project_all(d, s.vector()));

  std::vector<PairTransfer> out;
  for (std::size_t i = 0; i < states.size(); ++i)
    for (std::size_t j = i + 1; j < states.size(); ++j) {
      if (!cospectral_projections(proj[i], proj[j], 1e-8)) continue;
      const auto hits = search_pst(d, states[i], states[j], t_max, opts);
      if (!hits.empty()) out.push_back({states[i], states[j], hits.front()});
    }
  return out;
}

}  // namespace qwalk
