#ifndef ISOCHRON_INFINITY_HPP
#define ISOCHRON_INFINITY_HPP

#include <utility>
#include <vector>

#include "isochron/hamiltonian.hpp"

namespace isochron {

/// Point [beta : alpha : 0] of the closure, i.e. the direction of the factor (alpha x - beta y) of H_{n+1}.
struct InfinitePoint {
  Complex beta{1.0};
  Complex alpha{0.0};
  int multiplicity = 1;
  bool isPx = false;
  bool isPy = false;

  /// y/x along the asymptotic direction (meaningless for P_y).
  Complex slope() const { return alpha / beta; }
};

template <Field S>
std::vector<InfinitePoint> pointsAtInfinity(const HomogeneousHamiltonianSystem<S>& sys);

struct NewtonSegment {
  Exponent from;  // (k, l) with the larger l
  Exponent to;
  int slopeNum = 0;  // slope = slopeNum / slopeDen, slopeDen > 0
  int slopeDen = 1;
  double slope() const { return static_cast<double>(slopeNum) / slopeDen; }
};

struct NewtonPolygon {
  std::vector<NewtonSegment> segments;
};

template <Field S>
NewtonPolygon newtonPolygon(const BivarPoly<S>& f);

enum class ChartKind { AtPx, AtPy, Rotated };

/// X = s^xExponent, Y = s^yValuation * (ySeries[0] + ySeries[1] s + ...).
struct PuiseuxBranch {
  int xExponent = 1;
  int yValuation = 1;
  Complex yLeading;
  std::vector<Complex> ySeries;
  ChartKind chart = ChartKind::AtPx;
  int segment = 0;
};

/// Local chart at P: F(X, Y) = X^(n+1) (G(1/X, Y/X) - h), G = H after the linear map moving P to P_x.
struct InfinityChart {
  BivarPolyC f;
  ChartKind kind = ChartKind::AtPx;
  double orientation = 1.0;  // det of the linear map (x, y) = A (u, v)
  int degree = 0;            // n + 1
};

InfinityChart chartAt(const SystemC& sys, Complex h, const InfinitePoint& p);

/// Branches at the origin of F = 0, one family per Newton segment; axis components are skipped.
std::vector<PuiseuxBranch> puiseuxBranches(const BivarPolyC& f, int truncation);

/// Coefficients of s^0..s^K of s^(-c) F(s^p, s^q D(s)), c the segment weight.
std::vector<Complex> branchResidual(const BivarPolyC& f, const PuiseuxBranch& b);

/// s^-1 coefficient of dx/H_y along the branch (Laurent expansion).
Complex residueOnBranch(const InfinityChart& chart, const PuiseuxBranch& b);

/// Same quantity by a trapezoidal contour integral on a small circle in s.
Complex residueByContour(const InfinityChart& chart, const PuiseuxBranch& b, int samples = 128);

struct BranchResidue {
  PuiseuxBranch branch;
  Complex residue;
};

std::vector<BranchResidue> residueAtInfinity(const SystemC& sys, Complex h, const InfinitePoint& p,
                                             int truncation = -1);

/// Generic x-degree of the discriminant of H - h in y minus its x-degree at h; 0 when H has degree 1 in y.
int lambdaIndex(const SystemQ& sys, const GaussianRational& h);
int lambdaIndex(const SystemC& sys, Complex h);

struct TrackingOptions {
  double theta = 0.3;
  double retryTheta = 1.1;
  double startRadius = 1e-2;
  double endRadius = 1e-7;
  double minStepRatio = 0.98;
};

/// Ramification points of H = h' escaping in x toward P as h' -> h along a ray.
int lambdaIndexAtPoint(const SystemC& sys, Complex h, const InfinitePoint& p, const TrackingOptions& opts = {});
int lambdaIndexAtPoint(const SystemQ& sys, const GaussianRational& h, const InfinitePoint& p,
                       const TrackingOptions& opts = {});

}  // namespace isochron

#endif  // ISOCHRON_INFINITY_HPP
