#pragma once

namespace volterra {

// The two compatible Poisson structures on the weight space.  The tag fixes
// the annulator (I_0 resp. I_N) and the momentum exponent m in
// p_k = 2 ln rho_k / lambda_k^m.
enum class BracketKind { quadratic, cubic };

constexpr int momentum_exponent(BracketKind kind) { return kind == BracketKind::quadratic ? 1 : 3; }
constexpr int annulator_index(BracketKind kind, int n_gaps) {
    return kind == BracketKind::quadratic ? 0 : n_gaps;
}
constexpr const char* bracket_name(BracketKind kind) {
    return kind == BracketKind::quadratic ? "quadratic" : "cubic";
}

}  // namespace volterra
