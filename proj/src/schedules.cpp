#include <cmath>

#include "pmvr/error.hpp"
#include "pmvr/solvers.hpp"

namespace pmvr {

namespace {

double clamp_unit(double x) { return std::min(1.0, x); }

struct Rates {
  double eta, alpha, b1, iterations;
};

SolverParams single_stage(Criterion criterion, BatchMode mode, double eps,
                          const ScheduleConstants& c) {
  SolverParams p;
  Rates r{};
  double b0 = 0.0;
  const bool constant = mode == BatchMode::kConstant;
  if (criterion == Criterion::kFrankWolfeGap) {
    r = constant ? Rates{eps * eps, eps * eps, 1.0, std::pow(eps, -3.0)}
                 : Rates{eps, eps, 1.0 / eps, std::pow(eps, -2.0)};
    b0 = 1.0 / eps;
  } else {
    r = constant ? Rates{std::sqrt(eps), eps, 1.0, std::pow(eps, -1.5)}
                 : Rates{1.0, std::sqrt(eps), std::pow(eps, -0.5), 1.0 / eps};
    b0 = std::pow(eps, -0.5);
    p.subsolver = QuadraticSubsolver{c.beta, ceil_count(c.inner / eps), GammaRule::kClassic};
  }
  p.eta = clamp_unit(c.eta * r.eta);
  p.alpha = clamp_unit(c.alpha * r.alpha);
  p.b1 = ceil_count(c.b1 * r.b1);
  p.iterations = ceil_count(c.iterations * r.iterations);
  p.b0 = ceil_count(c.b0 * b0);
  return p;
}

StageSchedule staged(Criterion criterion, BatchMode mode, double eps, const ScheduleConstants& c,
                     std::optional<double> lambda) {
  if (!(c.eps1 > eps)) throw InvalidArgument("schedule: eps1 must exceed eps");
  const bool constant = mode == BatchMode::kConstant;
  const bool strong = criterion == Criterion::kStronglyConvexGap;
  double lam = 1.0;
  if (strong) {
    if (!lambda) throw InvalidArgument("schedule: strongly convex criteria need lambda");
    if (!(*lambda > 0.0)) throw InvalidArgument("schedule: lambda must be positive");
    lam = *lambda;
  }
  StageSchedule sched;
  sched.eps1 = c.eps1;
  const auto count = static_cast<std::size_t>(std::ceil(std::log2(c.eps1 / eps) - 1e-12));
  const std::size_t stages = std::max<std::size_t>(1, count);
  for (std::size_t s = 1; s <= stages; ++s) {
    const double es = c.eps1 / std::ldexp(1.0, static_cast<int>(s));
    Rates r{};
    if (!strong)
      r = constant ? Rates{es * es, es * es, 1.0, 1.0 / (es * es)} : Rates{es, es, 1.0 / es, 1.0 / es};
    else
      r = constant ? Rates{lam * es, lam * es, 1.0, 1.0 / (lam * es)}
                   : Rates{lam, lam, 1.0 / es, 1.0 / lam};
    StageParams p;
    p.eta = clamp_unit(c.eta * r.eta);
    p.alpha = clamp_unit(c.alpha * r.alpha);
    p.b1 = ceil_count(c.b1 * r.b1);
    p.iterations = ceil_count(c.iterations * r.iterations);
    sched.stages.push_back(p);
  }
  if (strong) {
    sched.b0 = ceil_count(c.b0 * std::max(1.0 / lam, 1.0));
    sched.subsolver = QuadraticSubsolver{lam / 2.0, ceil_count(c.inner * lam / eps),
                                         GammaRule::kClassic};
  } else {
    sched.b0 = ceil_count(c.b0 * sched.stages.front().b1);
  }
  return sched;
}

}  // namespace

std::size_t ceil_count(double x) {
  if (!std::isfinite(x)) throw InvalidArgument("schedule: non-finite count");
  if (x <= 1.0) return 1;
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

Schedule schedule_for(Criterion criterion, BatchMode mode, double eps,
                      const ScheduleConstants& constants, std::optional<double> lambda) {
  if (!(eps > 0.0 && eps <= 1.0)) throw InvalidArgument("schedule: eps must lie in (0, 1]");
  for (double v : {constants.eta, constants.alpha, constants.b0, constants.b1,
                   constants.iterations, constants.inner, constants.eps1, constants.beta})
    if (!(v > 0.0) || !std::isfinite(v))
      throw InvalidArgument("schedule: constants must be positive");
  if (criterion == Criterion::kFrankWolfeGap || criterion == Criterion::kGradientMapping)
    return single_stage(criterion, mode, eps, constants);
  return staged(criterion, mode, eps, constants, lambda);
}

Schedule theorem_schedule(int theorem, double eps, const ScheduleConstants& constants,
                          std::optional<double> lambda) {
  if (theorem < 1 || theorem > 8)
    throw InvalidArgument("schedule: theorem must be 1..8, got " + std::to_string(theorem));
  static constexpr Criterion kCriteria[] = {Criterion::kFrankWolfeGap, Criterion::kGradientMapping,
                                            Criterion::kConvexGap, Criterion::kStronglyConvexGap};
  const Criterion criterion = kCriteria[(theorem - 1) / 2];
  const BatchMode mode = theorem % 2 == 1 ? BatchMode::kConstant : BatchMode::kLarge;
  return schedule_for(criterion, mode, eps, constants, lambda);
}

}  // namespace pmvr
