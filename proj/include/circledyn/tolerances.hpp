#pragma once

namespace circledyn::tol {

// All approximate comparisons in the library go through the named constants
// below.  Tests and the acceptance suite reference the same values.

inline constexpr double kChartRoundTrip = 1e-12;     // chart conversion involution
inline constexpr double kChainRule = 1e-9;           // chain-rule vs direct derivative
inline constexpr double kInversePair = 1e-10;        // g'(x) * (g^-1)'(g x) = 1
inline constexpr double kLogDerivCancel = 1e-12;     // log-derivative of g g^-1
inline constexpr double kDistortionSlack = 1e-9;     // sampled inequality slack
inline constexpr double kGridRefine = 1e-6;          // doubling the grid changes < this
inline constexpr double kKappaBound = 1e-6;          // measured kappa vs log 2 bound
inline constexpr double kSemiconjugacy = 1e-9;       // quotient map defect
inline constexpr double kBisection = 1e-12;          // generic bracketed root target
inline constexpr double kNewtonPolish = 1e-14;       // inverse-branch solve target
inline constexpr double kInverseResidual = 1e-12;    // phi(inverse(y)) - y
inline constexpr double kGSBoundary = 1e-10;         // piece values agree at boundaries
inline constexpr double kGSHomomorphism = 1e-9;      // [f o g] vs [f] o [g]
inline constexpr double kConformalExact = 1e-12;     // per-atom defect, exact arithmetic
inline constexpr double kConformalFloat = 1e-6;      // per-atom defect, floating solves
inline constexpr double kNeProbe = 1e-9;             // derivative <= 1 + this at NE point
inline constexpr double kMassBalance = 1e-12;        // stored total vs sum of weights
inline constexpr double kRatioIdentity = 1e-9;       // forward/inverse derivative-sum identity

inline constexpr int kDefaultCFamilyGrid = 10000;    // samples per generator for C_F
inline constexpr double kCFamilySafety = 1.05;       // multiplier on the sampled C_F
inline constexpr int kDefaultKappaGrid = 1024;       // starting grid for extrema scans
inline constexpr int kMaxKappaGrid = 1 << 21;        // refinement cap
inline constexpr long kReturnIterCap = 10000000;     // first-return iteration cap
inline constexpr long kExpansionIterCap = 100000;    // expansion procedure step cap
inline constexpr int kItineraryDepthCap = 64;        // binary itinerary resolution cap
inline constexpr int kBruteForceCap = 14;            // exhaustive word-length cap

}  // namespace circledyn::tol
