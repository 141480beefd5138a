#pragma once

#include "pergraph/periodic_builder.hpp"

namespace pergraph::corpus {

/// Rung a-b, top a-a', bottom b-b'; sigma(a') = a, sigma(b') = b.
PeriodicSpec ladder();
/// Two parallel a-b edges and a segment b-c; sigma(c) = a.
PeriodicSpec circles_and_segments();
/// Spine a-b with a dangling edge b-p; sigma(b) = a.
PeriodicSpec pendant();
/// Circle of length 2*gamma at c, bridge c-s of length 2*beta, horizontal s-h of length delta.
PeriodicSpec signpost(double gamma = 0.5, double beta = 0.5, double delta = 0.5);
/// Pasting rule with a fixed point inside D and R.
PeriodicSpec starlike();
/// Two donors sharing one receiver.
PeriodicSpec nonbijective();
/// The real line: one unit edge, sigma(1) = 0.
PeriodicSpec interval();
/// A bridge chain s-c1-c2 with a circle at c1 and at c2.
PeriodicSpec two_pendant_circles();
/// A circle at v and a connector v-w; sigma(w) = v.
PeriodicSpec single_loop_chain();

}  // namespace pergraph::corpus
