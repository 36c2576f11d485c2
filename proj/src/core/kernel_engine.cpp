#include "rpavg/kernel_engine.hpp"

#include <algorithm>
#include <cstring>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "rpavg/errors.hpp"

namespace rpavg {

namespace {

constexpr std::size_t kLineChunk = 8192;

// Four-wide double vectors through the GCC/Clang vector extension; the
// compiler maps them onto whatever SIMD width the target offers.
typedef double V4 __attribute__((vector_size(32)));

inline V4 load4(const double* p) noexcept {
  V4 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void store4(double* p, V4 v) noexcept { std::memcpy(p, &v, sizeof v); }

bool deterministic_model(const TransitionMeasureModel& model) {
  const auto& s = model.spec();
  if (!s.perturbation.deterministic()) return false;
  if (model.has_smoothing() && !s.smoothing->epsilon.deterministic()) return false;
  return true;
}

struct Axis {
  double lo;
  double step;
  std::size_t count;
};

std::vector<Axis> grid_axes(const GridSpec& g, bool half_box) {
  if (!(g.T > 0.0) || !std::isfinite(g.T)) throw ArgumentError("grid half-width T must be finite and > 0");
  if (!(g.h > 0.0)) throw ArgumentError("grid spacing h must be > 0");
  std::vector<Axis> axes;
  for (int a = 0; a < g.d; ++a) {
    const bool half = half_box && a == 0;
    const double width = half ? g.T : 2.0 * g.T;
    const double cells = std::ceil(width / g.h);
    if (!(cells < 1e15)) throw SizeError("grid axis too long", 0.0);
    const auto count = static_cast<std::size_t>(cells) + 1;
    axes.push_back({half ? 0.0 : -g.T, width / static_cast<double>(count - 1), count});
  }
  return axes;
}

struct Candidate {
  double value;
  Vec point;
  bool operator>(const Candidate& o) const { return value > o.value; }
};

using MinHeap = std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>>;

}  // namespace

IndexSet enumerate_shells(int r, long long lo, long long hi) {
  if (r < 1) throw ArgumentError("index dimension r must be >= 1");
  if (lo < 0 || hi < lo) throw ArgumentError("need 0 <= lo <= hi for an index range");
  IndexSet set;
  set.r = r;
  set.lo = lo;
  set.hi = hi;
  MultiIndex k(static_cast<std::size_t>(r));
  for (long long j = lo + 1; j <= hi; ++j) {
    set.shell_offsets.push_back(set.indices.size());
    std::fill(k.begin(), k.end(), 1);
    while (true) {
      if (max_norm(k) == j) set.indices.push_back(k);
      int pos = r - 1;
      while (pos >= 0 && k[static_cast<std::size_t>(pos)] == j) {
        k[static_cast<std::size_t>(pos)] = 1;
        --pos;
      }
      if (pos < 0) break;
      ++k[static_cast<std::size_t>(pos)];
    }
  }
  set.shell_offsets.push_back(set.indices.size());
  return set;
}

ExponentialSum::ExponentialSum(int d, std::vector<Vec> positions, std::vector<double> coefficients,
                               std::optional<SmoothingKernel> kernel, std::vector<Vec> eps)
    : d_(d), coef_(std::move(coefficients)), kernel_(std::move(kernel)) {
  if (positions.size() != coef_.size()) throw ArgumentError("ExponentialSum: size mismatch");
  pos_.assign(static_cast<std::size_t>(d), std::vector<double>(coef_.size()));
  for (std::size_t k = 0; k < positions.size(); ++k)
    for (int a = 0; a < d; ++a) pos_[static_cast<std::size_t>(a)][k] = positions[k][static_cast<std::size_t>(a)];
  if (kernel_) {
    if (eps.size() != coef_.size()) throw ArgumentError("ExponentialSum: smoothing scale count mismatch");
    eps_.assign(static_cast<std::size_t>(d), std::vector<double>(coef_.size()));
    for (std::size_t k = 0; k < eps.size(); ++k)
      for (int a = 0; a < d; ++a) eps_[static_cast<std::size_t>(a)][k] = eps[k][static_cast<std::size_t>(a)];
  }
}

cplx ExponentialSum::value(std::span<const double> t) const {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < coef_.size(); ++k) {
    double phase = 0.0;
    for (int a = 0; a < d_; ++a) phase += pos_[static_cast<std::size_t>(a)][k] * t[static_cast<std::size_t>(a)];
    double w = coef_[k];
    if (kernel_)
      for (int a = 0; a < d_; ++a)
        w *= kernel_->transform_1d(eps_[static_cast<std::size_t>(a)][k] * t[static_cast<std::size_t>(a)]);
    re += w * std::cos(phase);
    im += w * std::sin(phase);
  }
  return {re, im};
}

void ExponentialSum::line(std::span<const double> start, int axis, double h, std::size_t count,
                          std::span<cplx> out) const {
  constexpr std::size_t L = kLanes;
  const std::size_t K = coef_.size();
  const std::size_t Kp = (K + L - 1) / L * L;
  const auto ax = static_cast<std::size_t>(axis);
  // Padding terms carry weight 0 and the identity rotation.
  std::vector<double> pr(Kp, 1.0), pi(Kp, 0.0), sr(Kp, 1.0), si(Kp, 0.0), w(Kp, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double step = pos_[ax][k] * h;
    sr[k] = std::cos(step);
    si[k] = std::sin(step);
    w[k] = coef_[k];
  }
  if (kernel_) {
    for (std::size_t k = 0; k < K; ++k)
      for (int a = 0; a < d_; ++a)
        if (a != axis) w[k] *= kernel_->transform_1d(eps_[static_cast<std::size_t>(a)][k] * start[static_cast<std::size_t>(a)]);
  }
  Vec t(start.begin(), start.end());
  std::vector<double> z;
  if (kernel_) z.assign(Kp, 0.0);
  for (std::size_t j = 0; j < count; ++j) {
    if (j % kAnchorInterval == 0) {
      t[ax] = start[ax] + static_cast<double>(j) * h;
      for (std::size_t k = 0; k < K; ++k) {
        double phase = 0.0;
        for (int a = 0; a < d_; ++a) phase += pos_[static_cast<std::size_t>(a)][k] * t[static_cast<std::size_t>(a)];
        pr[k] = std::cos(phase);
        pi[k] = std::sin(phase);
      }
    }
    const double* wk = w.data();
    if (kernel_) {
      const double tv = start[ax] + static_cast<double>(j) * h;
      const double* ex = eps_[ax].data();
      for (std::size_t k = 0; k < K; ++k) z[k] = w[k] * kernel_->transform_1d(ex[k] * tv);
      wk = z.data();
    }
    V4 ar0{}, ai0{}, ar1{}, ai1{};
    for (std::size_t k = 0; k < Kp; k += L) {
      const V4 a0 = load4(pr.data() + k), a1 = load4(pr.data() + k + 4);
      const V4 b0 = load4(pi.data() + k), b1 = load4(pi.data() + k + 4);
      const V4 c0 = load4(sr.data() + k), c1 = load4(sr.data() + k + 4);
      const V4 s0 = load4(si.data() + k), s1 = load4(si.data() + k + 4);
      const V4 w0 = load4(wk + k), w1 = load4(wk + k + 4);
      ar0 += w0 * a0;
      ai0 += w0 * b0;
      ar1 += w1 * a1;
      ai1 += w1 * b1;
      store4(pr.data() + k, a0 * c0 - b0 * s0);
      store4(pr.data() + k + 4, a1 * c1 - b1 * s1);
      store4(pi.data() + k, a0 * s0 + b0 * c0);
      store4(pi.data() + k + 4, a1 * s1 + b1 * c1);
    }
    const V4 rs = ar0 + ar1, is = ai0 + ai1;
    const double re = (rs[0] + rs[1]) + (rs[2] + rs[3]);
    const double im = (is[0] + is[1]) + (is[2] + is[3]);
    out[j] = {re, im};
  }
}

struct CenteredSum::Terms {
  std::vector<Vec> positions, centers, eps;
  std::vector<double> coefs;
  double lipschitz = 0.0, nominal = 0.0, mass = 0.0, sq = 0.0;
};

CenteredSum::Terms CenteredSum::realize(const TransitionMeasureModel& model, std::uint64_t seed,
                                        long long lo, long long hi,
                                        std::optional<double> uniform_coefficient) {
  if (lo < 0 || hi <= lo) throw ArgumentError("partial sums need m > n >= 0");
  const IndexSet set = enumerate_shells(model.r(), lo, hi);
  Terms out;
  const bool same = deterministic_model(model);
  out.positions.reserve(set.indices.size());
  for (const auto& k : set.indices) {
    RealizedTerm term = model.realize(seed, k);
    if (uniform_coefficient) term.coefficient = *uniform_coefficient;
    const double a = std::abs(term.coefficient);
    out.mass += a * model.term_mass();
    out.sq += term.coefficient * term.coefficient;
    if (!same) {
      const double em = model.expected_moment(term);
      out.lipschitz += a * (model.realized_moment(term) + em);
      out.nominal += a * 2.0 * em;
    }
    out.positions.push_back(std::move(term.position));
    out.centers.push_back(std::move(term.center));
    out.eps.push_back(std::move(term.eps));
    out.coefs.push_back(term.coefficient);
  }
  return out;
}

CenteredSum::CenteredSum(const TransitionMeasureModel& model, std::uint64_t seed, long long lo,
                         long long hi, std::optional<double> uniform_coefficient)
    : CenteredSum(model, realize(model, seed, lo, hi, uniform_coefficient)) {}

CenteredSum::CenteredSum(const TransitionMeasureModel& model, Terms r)
    : model_(model),
      realized_(model.d(), std::move(r.positions), r.coefs,
                model.has_smoothing() ? std::optional<SmoothingKernel>(model.spec().smoothing->kernel)
                                      : std::nullopt,
                model.has_smoothing() ? std::move(r.eps) : std::vector<Vec>{}),
      expected_(model.d(), std::move(r.centers), r.coefs),
      lipschitz_(r.lipschitz),
      nominal_lipschitz_(r.nominal),
      coef_mass_(r.mass),
      coef_sq_(r.sq),
      deterministic_(deterministic_model(model)),
      dirac_base_(model.base().size() == 1 && model.base().weight(0) == cplx(1.0) &&
                  std::all_of(model.base().point(0).begin(), model.base().point(0).end(),
                              [](double x) { return x == 0.0; })) {}

double CenteredSum::weighted_square_sum() const noexcept {
  const double m = model_.term_mass();
  return coef_sq_ * m * m;
}

cplx CenteredSum::combine(std::span<const double> t, cplx realized, cplx expected) const {
  cplx phi = model_.delta_transform(t).value;
  if (model_.has_smoothing()) phi *= model_.smoothing_transform(t).value;
  const cplx diff = realized - phi * expected;
  return dirac_base_ ? diff : model_.base_transform(t) * diff;
}

cplx CenteredSum::value(std::span<const double> t) const {
  if (t.size() != static_cast<std::size_t>(d())) throw ArgumentError("t has wrong dimension");
  if (deterministic_) return 0.0;
  return combine(t, realized_.value(t), expected_.value(t));
}

void CenteredSum::line(std::span<const double> start, int axis, double h, std::size_t count,
                       std::span<cplx> out) const {
  if (deterministic_) {
    std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(count), cplx(0.0));
    return;
  }
  std::vector<cplx> e(count);
  realized_.line(start, axis, h, count, out);
  expected_.line(start, axis, h, count, e);
  Vec t(start.begin(), start.end());
  const auto ax = static_cast<std::size_t>(axis);
  for (std::size_t j = 0; j < count; ++j) {
    t[ax] = start[ax] + static_cast<double>(j) * h;
    out[j] = combine(t, out[j], e[j]);
  }
}

cplx partial_sum_transform(const TransitionMeasureModel& model, std::uint64_t seed, long long n,
                           long long m, std::span<const double> t) {
  if (!(m > n && n >= 0)) throw ArgumentError("partial_sum_transform: need m > n >= 0");
  return CenteredSum(model, seed, n, m).value(t);
}

double default_spacing(const CenteredSum& sum) {
  const double lip = sum.nominal_lipschitz();
  if (!(lip > 0.0)) return 1.0;
  if (!std::isfinite(lip)) throw ConfigurationError("no finite Lipschitz bound: perturbation lacks a first moment");
  return 0.5 * std::max(1.0, sum.coefficient_mass()) / lip;
}

std::size_t grid_point_count(const GridSpec& grid, bool half_box) {
  double total = 1.0;
  for (const auto& a : grid_axes(grid, half_box)) total *= static_cast<double>(a.count);
  return total > 1.8e19 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(total);
}

SupResult sup_on_grid(const CenteredSum& sum, const GridSpec& grid) {
  if (grid.d != sum.d()) throw ArgumentError("grid dimension differs from model dimension");
  const bool half = grid.allow_half_box && sum.conjugate_symmetric();
  const std::size_t total = grid_point_count(grid, half);
  if (total > grid.budget) {
    const double per_axis = std::floor(std::pow(static_cast<double>(grid.budget), 1.0 / grid.d));
    const double suggested = 2.0 * grid.T / std::max(1.0, per_axis - 1.0);
    std::ostringstream os;
    os << "grid of " << total << " points exceeds budget " << grid.budget << "; try h >= " << suggested;
    throw SizeError(os.str(), suggested);
  }
  SupResult res;
  res.half_box = half;
  res.grid_points = total;
  res.lipschitz_constant = sum.lipschitz();
  res.argmax.assign(static_cast<std::size_t>(grid.d), 0.0);

  const auto axes = grid_axes(grid, half);
  const int d = grid.d;
  const int line_axis = d - 1;
  const auto la_idx = static_cast<std::size_t>(line_axis);
  double hsq = 0.0;
  for (const auto& a : axes) hsq += a.step * a.step;
  const double coarse_slack = 0.5 * std::sqrt(hsq) * res.lipschitz_constant;

  const bool refine = grid.refinement_levels > 0;
  const auto cells = std::max<std::size_t>(
      1, std::min(grid.max_refine_cells,
                  static_cast<std::size_t>(std::ceil(0.01 * static_cast<double>(total)))));
  MinHeap heap;
  double coarse_max = -1.0;

  std::vector<std::size_t> outer(static_cast<std::size_t>(d - 1), 0);
  Vec start(static_cast<std::size_t>(d));
  std::vector<cplx> buf(std::min(kLineChunk, axes.back().count));
  while (true) {
    for (std::size_t a = 0; a + 1 < static_cast<std::size_t>(d); ++a)
      start[a] = axes[a].lo + static_cast<double>(outer[a]) * axes[a].step;
    const Axis& la = axes.back();
    for (std::size_t off = 0; off < la.count; off += kLineChunk) {
      const std::size_t n = std::min(kLineChunk, la.count - off);
      start[la_idx] = la.lo + static_cast<double>(off) * la.step;
      sum.line(start, line_axis, la.step, n, buf);
      for (std::size_t j = 0; j < n; ++j) {
        const double v = std::abs(buf[j]);
        if (v > coarse_max) {
          coarse_max = v;
          res.argmax = start;
          res.argmax[la_idx] = start[la_idx] + static_cast<double>(j) * la.step;
        }
        if (refine && (heap.size() < cells + 1 || v > heap.top().value)) {
          Vec p = start;
          p[la_idx] += static_cast<double>(j) * la.step;
          heap.push({v, std::move(p)});
          if (heap.size() > cells + 1) heap.pop();
        }
      }
    }
    int pos = d - 2;
    while (pos >= 0 && ++outer[static_cast<std::size_t>(pos)] == axes[static_cast<std::size_t>(pos)].count) {
      outer[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  res.sup_value = coarse_max;
  if (!refine) {
    res.certified_bound = coarse_max + coarse_slack;
    return res;
  }
  // Every point outside the top cells is at most `threshold`, so the cells
  // around them are bounded by threshold + coarse_slack.
  double threshold = -1.0;
  if (heap.size() > cells) {
    threshold = heap.top().value;
    heap.pop();
  }
  const int R = std::max(2, grid.refine_factor);
  double fine_sq = 0.0;
  for (const auto& a : axes) fine_sq += (a.step / R) * (a.step / R);
  const double fine_slack = 0.5 * std::sqrt(fine_sq) * res.lipschitz_constant;
  double fine_max = -1.0;
  std::vector<cplx> fbuf(static_cast<std::size_t>(R));
  std::vector<int> sub(static_cast<std::size_t>(d - 1), 0);
  while (!heap.empty()) {
    const Vec centre = heap.top().point;
    heap.pop();
    ++res.refined_cells;
    std::fill(sub.begin(), sub.end(), 0);
    while (true) {
      Vec s(static_cast<std::size_t>(d));
      for (std::size_t a = 0; a < static_cast<std::size_t>(d); ++a) {
        const double st = axes[a].step;
        const int i = a + 1 < static_cast<std::size_t>(d) ? sub[a] : 0;
        s[a] = centre[a] - 0.5 * st + (i + 0.5) * st / R;
      }
      const double fst = axes.back().step / R;
      sum.line(s, line_axis, fst, static_cast<std::size_t>(R), fbuf);
      for (int j = 0; j < R; ++j) {
        const double v = std::abs(fbuf[static_cast<std::size_t>(j)]);
        fine_max = std::max(fine_max, v);
        if (v > res.sup_value) {
          res.sup_value = v;
          res.argmax = s;
          res.argmax[la_idx] += j * fst;
        }
      }
      int pos = d - 2;
      while (pos >= 0 && ++sub[static_cast<std::size_t>(pos)] == R) {
        sub[static_cast<std::size_t>(pos)] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
  }
  res.certified_bound = std::max(threshold >= 0.0 ? threshold + coarse_slack : 0.0, fine_max + fine_slack);
  res.certified_bound = std::max(res.certified_bound, res.sup_value);
  return res;
}

SupResult sup_on_grid(const TransitionMeasureModel& model, std::uint64_t seed, long long n,
                      long long m, const GridSpec& grid) {
  return sup_on_grid(CenteredSum(model, seed, n, m), grid);
}

GrowthFunction default_growth(const SubsequenceSpec& sub) {
  return GrowthFunction::exponential(2.0 + sub.certificate_constant(), sub.growth_exponent());
}

namespace {

GridSpec make_grid(const CenteredSum& sum, double T, const EngineOptions& o) {
  GridSpec g;
  g.T = T;
  g.h = o.spacing ? *o.spacing : default_spacing(sum);
  g.d = sum.d();
  g.refinement_levels = o.refinement_levels;
  g.refine_factor = o.refine_factor;
  g.max_refine_cells = o.max_refine_cells;
  g.budget = o.budget;
  return g;
}

}  // namespace

RatioStatistic ratio_statistic(const TransitionMeasureModel& model, std::uint64_t seed,
                               std::span<const std::pair<long long, long long>> pairs,
                               std::span<const double> Ts, const GrowthFunction& phi,
                               RatioMode mode, const EngineOptions& options) {
  if (pairs.empty()) throw ArgumentError("ratio_statistic: empty (n, m) list");
  if (Ts.empty()) throw ArgumentError("ratio_statistic: empty T list");
  if (mode == RatioMode::kProbability && !model.is_probability())
    throw ArgumentError("ratio_statistic: the probability form needs probability transition measures");
  for (double T : Ts)
    if (!(T >= 2.0)) throw ArgumentError("ratio_statistic: every T must be >= 2");
  RatioStatistic out;
  out.value = -1.0;
  for (const auto& [n, m] : pairs) {
    if (!(m > n && n >= 0)) throw ArgumentError("ratio_statistic: need m > n >= 0");
    const CenteredSum sum(model, seed, n, m);
    for (double T : Ts) {
      RatioEntry e;
      e.n = n;
      e.m = m;
      e.T = T;
      e.sup = sup_on_grid(sum, make_grid(sum, T, options));
      const double lg = std::max(phi.log_phi(static_cast<double>(m)), std::log(T));
      e.denominator = mode == RatioMode::kProbability ? sum.coefficient_square_sum() * lg
                                                      : 1.0 + sum.weighted_square_sum() * lg;
      e.ratio = e.sup.sup_value * e.sup.sup_value / e.denominator;
      if (e.ratio > out.value) {
        out.value = e.ratio;
        out.n = n;
        out.m = m;
        out.T = T;
        out.argmax = e.sup.argmax;
      }
      out.entries.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<DecayRow> decay_profile(const TransitionMeasureModel& model, std::uint64_t seed,
                                    std::span<const long long> ns, double beta, int r,
                                    const EngineOptions& options) {
  if (!model.is_probability())
    throw ArgumentError("decay_profile needs probability transition measures");
  std::vector<DecayRow> rows;
  for (long long n : ns) {
    if (n < 1) throw ArgumentError("decay_profile: n must be >= 1");
    DecayRow row;
    row.n = n;
    const double b = std::pow(static_cast<double>(n), model.r());
    const CenteredSum sum(model, seed, 0, n, 1.0 / b);
    row.T_target = std::exp2(std::pow(static_cast<double>(n), r * beta));
    double T = std::min(row.T_target, options.T_max);
    row.capped = T < row.T_target;
    GridSpec g = make_grid(sum, T, options);
    const bool half = g.allow_half_box && sum.conjugate_symmetric();
    std::size_t pts = grid_point_count(g, half);
    while (pts > g.budget) {
      g.T *= 0.99 * std::pow(static_cast<double>(g.budget) / static_cast<double>(pts), 1.0 / g.d);
      row.capped = true;
      pts = grid_point_count(g, half);
    }
    row.T_used = g.T;
    row.spacing = g.h;
    const SupResult s = sup_on_grid(sum, g);
    row.sup_sq = s.sup_value * s.sup_value;
    row.certified_sq = s.certified_bound * s.certified_bound;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace rpavg
