#ifndef ISOCHRON_CYCLES_HPP
#define ISOCHRON_CYCLES_HPP

#include <optional>
#include <string>
#include <vector>

#include "isochron/hamiltonian.hpp"
#include "isochron/infinity.hpp"

namespace isochron {

struct FiberPoint {
  Complex x;
  Complex y;
};

enum class LoopOrientation { Standard, Reversed };

struct LoopAnchor {
  enum class Kind { Origin, Saddle, InfinityCycle, Continued };
  Kind kind = Kind::Origin;
  int index = -1;        // saddle index or branch index
  InfinitePoint point;   // for InfinityCycle
  std::string path;      // description of the continuation path
};

std::string anchorName(const LoopAnchor& a);

/// Closed loop on H = h sampled at equispaced parameter values; samples.front() == samples.back().
struct FiberLoop {
  SystemC system;
  Complex h;
  std::vector<FiberPoint> samples;
  LoopOrientation orientation = LoopOrientation::Standard;
  LoopAnchor anchor;

  int size() const { return static_cast<int>(samples.size()) - 1; }
  double maxResidual() const;
  double minGradient() const;
};

struct PeriodSample {
  Complex h;
  Complex T;
  LoopAnchor loopAnchor;
  double quadratureError = 0.0;
};

struct HPath {
  std::vector<Complex> waypoints;
  struct Winding {
    Complex value;
    int winding = 0;
  };
  std::vector<Winding> encircles;

  Complex start() const { return waypoints.front(); }
  Complex end() const { return waypoints.back(); }
  double length() const;
};

/// Counterclockwise circle through `start` around `center`, closed polyline with `pieces` edges.
HPath circlePath(Complex center, Complex start, int pieces = 256);
/// Fills `encircles` with winding numbers around each value (closed paths only).
void annotateWinding(HPath& path, const std::vector<Complex>& values);
/// Default clearance: 0.1 * min pairwise distance of the values (1 if fewer than two).
double defaultClearance(const std::vector<Complex>& values);
/// Distance from the polyline to the nearest value.
double pathClearance(const HPath& path, const std::vector<Complex>& values);

constexpr int kDefaultSamples = 512;

FiberLoop liftOriginLoop(const SystemC& sys, Complex h, int samples = kDefaultSamples, double c = 1.0);

PeriodSample period(const FiberLoop& loop);

FiberLoop liftSaddleLoop(const SystemC& sys, Complex h, const CriticalPoint& saddle, int samples = kDefaultSamples);

/// Loops around the N points on the exceptional divisor of the blow-up at P_x (or P_y).
std::vector<FiberLoop> liftInfinityCycles(const SystemC& sys, Complex h, const InfinitePoint& p,
                                          int samples = kDefaultSamples);

struct ContinuationOptions {
  double stepFraction = 0.02;   // |dh| <= stepFraction * distance to nearest atypical value
  double gradientFloor = 1e-8;  // below this the loop is too close to a critical point
  int maxSamples = 1 << 15;
};

FiberLoop continueLoop(const SystemC& sys, const FiberLoop& loop, const HPath& path,
                       const ContinuationOptions& opts = {});

struct MonodromyReport {
  int caseId = 0;
  Complex baseH;
  Complex encircledValue;          // nonzero atypical value used for the first loop
  Complex periodGamma;             // period of the origin loop at baseH
  std::vector<Complex> saddlePeriods;
  std::vector<Complex> infinityPeriods;
  Complex predictedCoefficient;    // shift = -m * predictedCoefficient
  Complex asymptoticCoefficient;   // same with every vanishing period replaced by its h -> 0 limit
  Complex periodDelta;             // period after the first loop
  Complex periodAfter;             // period after the loop around 0
  Complex shift;
  double mReal = 0.0;
  long m = 0;
  double roundingResidual = 0.0;
  bool onLattice = false;
  bool nonzero = false;
};

MonodromyReport monodromyLatticeCheck(const SystemC& sys, int caseId);

struct PeriodScanResult {
  std::vector<PeriodSample> samples;
  std::vector<std::string> errors;  // one entry per failed grid point
  double statistic = 0.0;           // max |T(h) - 2 pi i| over successful samples
};

/// Thread count from ISOCHRON_THREADS, else hardware concurrency.
int scanThreadCount();

PeriodScanResult periodScan(const SystemC& sys, const std::vector<Complex>& hGrid, int samples = kDefaultSamples);

}  // namespace isochron

#endif  // ISOCHRON_CYCLES_HPP
