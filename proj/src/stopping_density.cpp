#include "wlrgs/stopping_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wlrgs/error.hpp"
#include "wlrgs/normal.hpp"

namespace wlrgs {

namespace {

constexpr const char* kModule = "boundary_engine";

// Gaussian kernel support, in standard deviations; phi(9) ~ 1e-18.
constexpr double kKernelReach = 9.0;

}  // namespace

Grid Grid::forDrift(double maxAbsDrift, Eigen::Index points) {
  const double half = 8.0 + std::abs(maxAbsDrift);
  return Grid{-half, half, points};
}

StoppingDensity::StoppingDensity(Grid grid, std::optional<double> momentDivisor)
    : grid_(grid), nodes_(grid.nodes()), momentDivisor_(momentDivisor) {
  if (grid_.points < 3 || !(grid_.upper > grid_.lower))
    throw InputError(kModule, "grid needs at least 3 points on a non-empty range");
  if (momentDivisor_ && !(*momentDivisor_ != 0))
    throw InputError(kModule, "moment divisor must be non-zero");
}

const StoppingDensity::Stage& StoppingDensity::at(int j) const {
  if (j < 1 || j > stages()) throw InputError(kModule, "analysis index out of range");
  return stages_[static_cast<std::size_t>(j - 1)];
}

const StoppingDensity::Atoms* StoppingDensity::source(int j) const {
  return j == 1 ? nullptr : &at(j - 1).carry;
}

void StoppingDensity::addStage(double fraction, double mean) {
  if (!stages_.empty() && !stages_.back().closed)
    throw InputError(kModule, "continuation region of the previous analysis not set");
  const double prevF = stages_.empty() ? 0.0 : stages_.back().fraction;
  const double prevMean = stages_.empty() ? 0.0 : stages_.back().mean;
  const double inc = fraction - prevF;
  if (!(inc > 0)) throw InputError(kModule, "non-increasing information");

  const double h = grid_.step();
  if (h > 0.25 * std::sqrt(inc)) {
    std::ostringstream os;
    os << "grid too coarse: spacing " << h << " exceeds a quarter of the increment sd "
       << std::sqrt(inc) << " at analysis " << stages() + 1
       << "; increase the number of grid points";
    throw InputError(kModule, os.str());
  }

  Stage s;
  s.fraction = fraction;
  s.increment = inc;
  s.mean = mean;
  s.shift = mean - prevMean;
  stages_.push_back(std::move(s));
}

double StoppingDensity::density(int j, double x) const {
  const Stage& s = at(j);
  const Atoms* src = source(j);
  if (!src) return normal::pdf(x - s.mean, s.fraction);
  if (src->loc.size() == 0) return 0.0;
  const double sd = std::sqrt(s.increment);
  const Eigen::ArrayXd z = (x - src->loc - s.shift) / sd;
  return (src->mass * normal::pdf(z)).sum() / sd;
}

double StoppingDensity::moment(int j, double x) const {
  if (!momentDivisor_) throw InputError(kModule, "moment channel not enabled");
  const Stage& s = at(j);
  const Atoms* src = source(j);
  if (!src) return x / *momentDivisor_ * normal::pdf(x - s.mean, s.fraction);
  if (src->loc.size() == 0) return 0.0;
  const double sd = std::sqrt(s.increment);
  const Eigen::ArrayXd z = (x - src->loc - s.shift) / sd;
  return (src->moment * normal::pdf(z)).sum() / sd;
}

double StoppingDensity::upperTail(int j, double x) const {
  if (x == std::numeric_limits<double>::infinity()) return 0.0;
  const Stage& s = at(j);
  const Atoms* src = source(j);
  if (!src) return normal::sf((x - s.mean) / std::sqrt(s.fraction));
  if (src->loc.size() == 0) return 0.0;
  if (x == -std::numeric_limits<double>::infinity()) return src->mass.sum();
  const double sd = std::sqrt(s.increment);
  return (src->mass * normal::sf((x - src->loc - s.shift) / sd)).sum();
}

double StoppingDensity::lowerTail(int j, double x) const {
  if (x == -std::numeric_limits<double>::infinity()) return 0.0;
  const Stage& s = at(j);
  const Atoms* src = source(j);
  if (!src) return normal::sf(-(x - s.mean) / std::sqrt(s.fraction));
  if (src->loc.size() == 0) return 0.0;
  if (x == std::numeric_limits<double>::infinity()) return src->mass.sum();
  const double sd = std::sqrt(s.increment);
  return (src->mass * normal::sf(-(x - src->loc - s.shift) / sd)).sum();
}

double StoppingDensity::mass(int j) const {
  const Atoms* src = source(j);
  return src ? src->mass.sum() : 1.0;
}

double StoppingDensity::stopMass(int j) const {
  const Stage& s = at(j);
  if (!s.closed) return 0.0;
  return upperTail(j, s.hi) + lowerTail(j, s.lo);
}

double StoppingDensity::continuationMass(int j) const {
  const Stage& s = at(j);
  if (!s.closed) return mass(j);
  return s.carry.mass.sum();
}

void StoppingDensity::gridValues(int j, Eigen::ArrayXd& dens, Eigen::ArrayXd* mom) const {
  const Stage& s = at(j);
  const Atoms* src = source(j);
  const Eigen::Index n = grid_.points;

  if (!src) {
    dens = normal::pdf((nodes_ - s.mean) / std::sqrt(s.fraction)) / std::sqrt(s.fraction);
    if (mom) *mom = nodes_ / *momentDivisor_ * dens;
    return;
  }

  dens = Eigen::ArrayXd::Zero(n);
  if (mom) *mom = Eigen::ArrayXd::Zero(n);
  const Eigen::Index atoms = src->loc.size();
  if (atoms == 0) return;

  const double sd = std::sqrt(s.increment);
  const double h = grid_.step();

  // Region endpoints are off-grid in general: evaluate directly.
  for (Eigen::Index a : {Eigen::Index(0), atoms - 1}) {
    const Eigen::ArrayXd k = normal::pdf((nodes_ - src->loc[a] - s.shift) / sd) / sd;
    dens += src->mass[a] * k;
    if (mom) *mom += src->moment[a] * k;
  }

  // On-grid atoms: the kernel depends only on the index offset.
  const auto reach = std::min<Eigen::Index>(
      n - 1, static_cast<Eigen::Index>(std::ceil((kKernelReach * sd + std::abs(s.shift)) / h)));
  const Eigen::ArrayXd offsets = Eigen::ArrayXd::LinSpaced(2 * reach + 1, double(-reach),
                                                           double(reach));
  const Eigen::ArrayXd kernel = normal::pdf((offsets * h - s.shift) / sd) / sd;

  for (Eigen::Index a = 1; a <= src->gridCount; ++a) {
    const Eigen::Index node = src->gridFirst + a - 1;
    const Eigen::Index from = std::max<Eigen::Index>(0, node - reach);
    const Eigen::Index to = std::min<Eigen::Index>(n - 1, node + reach);
    const Eigen::Index len = to - from + 1;
    const auto k = kernel.segment(from - node + reach, len);
    dens.segment(from, len) += src->mass[a] * k;
    if (mom) mom->segment(from, len) += src->moment[a] * k;
  }
}

Eigen::ArrayXd StoppingDensity::gridDensity(int j) const {
  Eigen::ArrayXd dens;
  gridValues(j, dens, nullptr);
  return dens;
}

void StoppingDensity::setContinuation(double lo, double hi) {
  if (stages_.empty()) throw InputError(kModule, "no analysis to close");
  const int j = stages();
  Stage& s = stages_.back();
  s.lo = lo;
  s.hi = hi;
  s.closed = true;
  s.carry = Atoms{};

  const double a = std::max(lo, grid_.lower);
  const double b = std::min(hi, grid_.upper);
  if (!(b > a)) {
    s.carry.loc.resize(0);
    s.carry.mass.resize(0);
    s.carry.moment.resize(0);
    return;
  }

  const double h = grid_.step();
  const double eps = 1e-9 * h;
  auto first = static_cast<Eigen::Index>(std::floor((a - grid_.lower) / h)) + 1;
  while (first > 0 && nodes_[first - 1] > a + eps) --first;
  while (first < grid_.points && nodes_[first] <= a + eps) ++first;
  auto last = static_cast<Eigen::Index>(std::ceil((b - grid_.lower) / h)) - 1;
  last = std::min(last, grid_.points - 1);
  while (last + 1 < grid_.points && nodes_[last + 1] < b - eps) ++last;
  while (last >= 0 && nodes_[last] >= b - eps) --last;
  const Eigen::Index interior = std::max<Eigen::Index>(0, last - first + 1);

  Atoms& c = s.carry;
  c.gridFirst = first;
  c.gridCount = interior;
  const Eigen::Index count = interior + 2;
  c.loc.resize(count);
  c.loc[0] = a;
  if (interior > 0) c.loc.segment(1, interior) = nodes_.segment(first, interior);
  c.loc[count - 1] = b;

  // Trapezoid weights on the (possibly non-uniform) end cells.
  Eigen::ArrayXd w(count);
  const Eigen::ArrayXd gaps = c.loc.tail(count - 1) - c.loc.head(count - 1);
  w.setZero();
  w.head(count - 1) += gaps / 2;
  w.tail(count - 1) += gaps / 2;

  Eigen::ArrayXd dens, mom;
  gridValues(j, dens, tracksMoment() ? &mom : nullptr);

  Eigen::ArrayXd values(count);
  values[0] = density(j, a);
  values[count - 1] = density(j, b);
  if (interior > 0) values.segment(1, interior) = dens.segment(first, interior);
  c.mass = w * values;

  // The tails of the mixture are exact, so the continuation mass is known;
  // rescaling removes the O(h^2) trapezoid error of the truncated end cells.
  const double exact = mass(j) - upperTail(j, hi) - lowerTail(j, lo);
  const double trapezoid = c.mass.sum();
  const double scale = trapezoid > 0 && exact > 0 ? exact / trapezoid : 1.0;
  c.mass *= scale;

  if (tracksMoment()) {
    Eigen::ArrayXd mvals(count);
    mvals[0] = moment(j, a);
    mvals[count - 1] = moment(j, b);
    if (interior > 0) mvals.segment(1, interior) = mom.segment(first, interior);
    c.moment = scale * w * mvals;
  } else {
    c.moment = Eigen::ArrayXd::Zero(count);
  }
}

}  // namespace wlrgs
