#pragma once

#include <cmath>
#include <vector>

#include "asyncsi/aux_dist.hpp"
#include "asyncsi/channel.hpp"
#include "asyncsi/joint_pmf.hpp"
#include "asyncsi/theorem1.hpp"

namespace asyncsi {

// I(U;Y) - I(U;S) for the synchronous Gel'fand-Pinsker law
// P_S(s) P_{U,X|S}(u,x|s) W(y|x,s). Written out directly rather than through
// the Theorem-1 path so the D=1 reduction is a real cross-check.
inline double gp_objective(const StateChannel& ch, const AuxDistribution& aux) {
  detail::check_aux_matches(ch, aux);
  const int nu = aux.nu();
  std::vector<double> juy(static_cast<std::size_t>(nu) * ch.ny(), 0.0);
  std::vector<double> jus(static_cast<std::size_t>(nu) * ch.ns(), 0.0);
  for (int s = 0; s < ch.ns(); ++s) {
    const double ps = ch.state_prior()[s];
    for (int u = 0; u < nu; ++u) {
      for (int x = 0; x < ch.nx(); ++x) {
        const double m = ps * aux.p(u, x, s);
        if (m == 0.0) continue;
        jus[static_cast<std::size_t>(u) * ch.ns() + s] += m;
        for (int y = 0; y < ch.ny(); ++y) {
          juy[static_cast<std::size_t>(u) * ch.ny() + y] += m * ch.w(y, x, s);
        }
      }
    }
  }
  const JointPmf uy({{"U", nu}, {"Y", ch.ny()}}, std::move(juy));
  const JointPmf us({{"U", nu}, {"S", ch.ns()}}, std::move(jus));
  return mutual_information(uy) - mutual_information(us);
}

// Synchronous Gel'fand-Pinsker capacity estimate: multi-start projected
// ascent over P_{U,X|S} with the exhaustive-grid fallback on tiny instances.
inline SolveReport gp_capacity(const StateChannel& ch, const SearchConfig& cfg = {}) {
  SolveReport r = detail::t1_family_search(ch, 1, cfg, "gp-multistart-pga");
  return r;
}

// With feedback the encoder learns the delay from a vanishing training
// prefix, so the asynchronous capacity collapses to the synchronous one.
inline SolveReport agp_feedback_capacity(const StateChannel& ch, const SearchConfig& cfg = {}) {
  SolveReport r = gp_capacity(ch, cfg);
  r.method = "feedback = synchronous GP (" + r.method + ")";
  return r;
}

}  // namespace asyncsi
