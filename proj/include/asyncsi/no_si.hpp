#pragma once

#include <string>

#include "asyncsi/channel.hpp"
#include "asyncsi/maximin.hpp"

namespace asyncsi {

// Capacity with the side information ignored: max_P_X I(X;Y) of the
// state-averaged channel Wbar(y|x) = sum_s P_S(s) W(y|x,s). Classic
// Blahut-Arimoto; the duality gap certifies the value to the target.
inline SolveReport no_si_capacity(const StateChannel& ch, double target_gap = 1e-9) {
  MaximinProblem prob;
  prob.branches = 1;
  prob.nv = 1;
  prob.nx = ch.nx();
  prob.ny = ch.ny();
  prob.v_prior = {1.0};
  prob.w = ch.averaged();
  MaximinConfig cfg;
  cfg.target_gap = target_gap;
  cfg.inner_tol = target_gap * 0.1;
  SolveReport r = solve_maximin(prob, cfg);
  r.method = "blahut-arimoto";
  r.argument_shape = "p(x) nx=" + std::to_string(ch.nx());
  return r;
}

}  // namespace asyncsi
