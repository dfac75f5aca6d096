// Generated by tests/oracle/compute_reference_values.py -- do not edit.
// High-precision (60-digit) evaluations of the receiver closed forms,
// rounded to double. Regenerate with the script if formulas change.
#pragma once

namespace refvals {

inline constexpr double kHelstromA2_016 = 0.15623133652230915;
inline constexpr double kKennedyA2_016 = 0.26364621202152428;
inline constexpr double kHomodyneA2_016 = 0.21185539858339669;
inline constexpr double kHomodyneA2_05 = 0.078649603525142565;
inline constexpr double kHomodyneModelPaperA2_016 = 0.21243307792891833;  // eff 0.858, excess 0.005, physical a2 = 0.16/0.858
inline constexpr double kOptBetaIdealAlpha04 = 0.74710536801973384;
inline constexpr double kOptBeta2IdealAlpha04 = 0.55816643092390193;
inline constexpr double kOptErrorIdealAlpha04 = 0.19087654969536358;
inline constexpr double kDispIdealT1Alpha04Beta0748 = 0.19087699395395765;
inline constexpr double kDispEta055Xi0996T0977Alpha04Beta0748 = 0.27759204181973317;  // regression value for the imperfect-detector evaluation
inline constexpr double kMutualInfoAtOptError = 0.29669846316425761;
inline constexpr double kCrossoverKennedyHomodyneA2 = 0.38409927839541491;
inline constexpr double kToptIdealGamma2_247Alpha04 = 0.97786524933094391;
inline constexpr double kBetaAtToptIdealGamma2_247 = 0.73941080701169455;
inline constexpr double kErrorAtToptIdealGamma2_247 = 0.19365196143691629;
inline constexpr double kGapToFixedBetaOptGamma2_247 = 0.0027754117415527163;  // finite-AO penalty vs the T=1 optimum
inline constexpr double kGapGamma2_100 = 0.00068666094515861631;
inline constexpr double kGapGamma2_1000 = 6.8697178862873953e-5;
inline constexpr double kGapGamma2_10000 = 6.8700226908954587e-6;
inline constexpr double kToptImpGamma2_247Alpha04 = 0.96238799103445651;  // eta=0.55, xi=0.996
inline constexpr double kBetaAtToptImpGamma2_247 = 0.96385508321994344;
inline constexpr double kErrorAtToptImpGamma2_247 = 0.26499877361429643;
inline constexpr double kOptBetaIdealAlpha3 = 3.0000000000000014;
inline constexpr double kOptBetaIdealAlpha1e4 = 0.70710678354357014;  // tends to 1/sqrt(2) as alpha -> 0

}  // namespace refvals
