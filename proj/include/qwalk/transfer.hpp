#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/spectral.hpp"

namespace qwalk {

enum class StateKind { Vertex, Pair, Plus, SPair, Raw };

/// Real unit vector over the vertex set, tagged with how it was built.
class PureState {
 public:
  static PureState vertex(std::size_t n, std::size_t a);
  /// (e_a - e_b) / sqrt(2)
  static PureState pair(std::size_t n, std::size_t a, std::size_t b);
  /// (e_a + e_b) / sqrt(2)
  static PureState plus(std::size_t n, std::size_t a, std::size_t b);
  /// (e_a + s e_b) / sqrt(1 + s^2), s != 0
  static PureState s_pair(std::size_t n, std::size_t a, std::size_t b, double s);
  /// Normalises v; throws for the zero vector.
  static PureState raw(std::vector<double> v);

  std::size_t dimension() const noexcept { return vec_.size(); }
  std::span<const double> vector() const noexcept { return vec_; }
  StateKind kind() const noexcept { return kind_; }
  std::size_t a() const noexcept { return a_; }
  std::size_t b() const noexcept { return b_; }
  double s() const noexcept { return s_; }

  /// CLI syntax: v:3, pair:1,4, plus:2,5, spair:1,4:0.5, raw:[...]
  std::string label() const;

 private:
  PureState(std::vector<double> v, StateKind kind, std::size_t a, std::size_t b, double s)
      : vec_(std::move(v)), kind_(kind), a_(a), b_(b), s_(s) {}

  std::vector<double> vec_;
  StateKind kind_;
  std::size_t a_ = 0;
  std::size_t b_ = 0;
  double s_ = 0.0;
};

/// Parses the CLI state syntax for a graph of order n.
PureState parse_state(std::string_view spec, std::size_t n);

enum class Verdict { PST, NoPstAtTime, Periodic, NotStronglyCospectral, FixedState };

std::string to_string(Verdict v);

inline constexpr double kDefaultPstTol = 1e-9;

struct TransferReport {
  Verdict verdict = Verdict::NoPstAtTime;
  double time = 0.0;
  std::complex<double> phase{1.0, 0.0};  // gamma in U(t) x = gamma y when PST
  double fidelity = 0.0;
  double residual = 1.0;  // 1 - fidelity
  bool strongly_cospectral = false;
};

/// y^T U(t) x
std::complex<double> amplitude(const SpectralDecomposition& d, const PureState& x,
                               const PureState& y, double t);
/// |y^T U(t) x|
double fidelity(const SpectralDecomposition& d, const PureState& x, const PureState& y,
                double t);

/// PST verdict iff fidelity >= 1 - pst_tol. Below the bar the verdict names
/// the first obstruction found: fixed state, missing strong cospectrality,
/// or plain miss at this time.
TransferReport detect_pst(const SpectralDecomposition& d, const PureState& x,
                          const PureState& y, double t, double pst_tol = kDefaultPstTol);

/// Throws std::invalid_argument when x and y are parallel.
bool is_strongly_cospectral(const SpectralDecomposition& d, const PureState& x,
                            const PureState& y, double tol = 1e-8);

bool is_periodic_at(const SpectralDecomposition& d, const PureState& x, double t,
                    double tol = kDefaultPstTol);

struct TimePoint {
  double time = 0.0;
  double fidelity = 0.0;
};

struct SearchOptions {
  double grid_step = 0.0;  // 0: pi / (64 * spectral diameter)
  int refine_iters = 60;
  double pst_tol = kDefaultPstTol;
};

/// Default scan step for a decomposition.
double default_grid_step(const SpectralDecomposition& d, double t_max);

/// Grid scan of (0, t_max] with golden-section refinement of local maxima.
/// Only times certified at fidelity >= 1 - pst_tol are returned. An empty
/// result means "not found on this horizon", nothing stronger.
std::vector<TimePoint> search_pst(const SpectralDecomposition& d, const PureState& x,
                                  const PureState& y, double t_max,
                                  const SearchOptions& opts = {});

/// Smallest |x^T U(t) x| seen on the refined grid over (0, t_max]. This is an
/// upper bound on the true infimum over all t > 0.
double sedentariness_estimate(const SpectralDecomposition& d, const PureState& x, double t_max,
                              double grid_step = 0.0);

struct PgstScan {
  TimePoint best;
  std::vector<TimePoint> records;  // strictly increasing record fidelities
};

/// Best fidelity found on (0, t_max]; stops once `target` is reached. A
/// heuristic only: pretty good state transfer is a limit property.
PgstScan pgst_heuristic(const SpectralDecomposition& d, const PureState& x,
                        const PureState& y, double t_max, double target = 1.0,
                        double grid_step = 0.0);

/// Samples |y^T U(t) x| at `samples` uniformly spaced t in [0, t_max].
std::vector<TimePoint> fidelity_curve(const SpectralDecomposition& d, const PureState& x,
                                      const PureState& y, double t_max, std::size_t samples);

struct PairTransfer {
  PureState x;
  PureState y;
  TimePoint first;
};

/// Exhaustive pair-state PST search: all (e_k - e_l)/sqrt(2) against each
/// other, pre-filtered by strong cospectrality. Earliest time per state pair.
std::vector<PairTransfer> find_pair_pst(const SpectralDecomposition& d, double t_max,
                                        const SearchOptions& opts = {});

}  // namespace qwalk
