#pragma once

#include "csimit/ldag.hpp"
#include "csimit/scm.hpp"

namespace csimit::scenarios {

// Worked example graphs used across the test and benchmark suites; the
// driving scenarios differ only in how the (latent) speed limit S feeds the
// driver's action.

/// Speed limit confounds action and reward: not imitable.
Ldag driving_confounded();
/// Cruise control: the action ignores the speed limit; imitable via {Z,T}.
Ldag driving_cruise_control();
/// The speed-limit edge is absent under heavy traffic (label T=1).
Ldag driving_traffic_context();

/// Six-vertex graph with labels Z=0 and T=0; exercises context-induced
/// subgraph construction.
Ldag mediated_context_pair();

/// Pricing under recession: demand confounds price and sales except when
/// C=0; the sales figure is an imitation surrogate with a context-transported
/// estimand.
Ldag pricing_recession();

/// Nine-vertex sales chain with three labels; no unconditional surrogate,
/// contexts C=0 / C=1 behave differently.
Ldag sales_chain();

/// Six-variable form of the pricing scenario (the sales chain with the
/// mediator chain collapsed); used by the policy-comparison experiment.
Ldag pricing_six_variable();

/// The fully specified SCM for pricing_six_variable: ternary reward, sales
/// equal to XNOR(X, U1) in the C=0 branch, unspecified C=1 sales rows filled
/// uniform (flagged in the model notes).
DiscreteScm pricing_six_variable_scm();

}  // namespace csimit::scenarios
