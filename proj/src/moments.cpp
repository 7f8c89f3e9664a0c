#include "hqc/moments.hpp"

#include <iomanip>
#include <ostream>

#include "hqc/errors.hpp"
#include "hqc/parallel.hpp"

namespace hqc {

MomentField::MomentField(const PhaseGrid& g, int k) : grid(g), order(k), F(g.size(), 0.0) {
  if (k < 0 || k > 3) throw InvalidArgument("moment order must be 0..3");
  if (k >= 1) first.assign(g.size(), PauliVector{});
  if (k >= 2) second.assign(g.size(), SymmetricTwoBody{});
  if (k >= 3) third.assign(g.size(), ThreeBody{});
}

ThreeBody cube(const PauliVector& p) {
  ThreeBody d{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b)
      for (std::size_t c = 0; c < 4; ++c) d[three_index(a, b, c)] = p[a] * p[b] * p[c];
  return d;
}

SymmetricTwoBody partial_trace_first(const ThreeBody& d) {
  SymmetricTwoBody t;
  for (std::size_t b = 0; b < 4; ++b)
    for (std::size_t c = b; c < 4; ++c) t(b, c) = 2.0 * d[three_index(0, b, c)];
  return t;
}

ThreeBody mixture_third_moment(const ConditionalMixtureField& density, const ClassicalPoint& xi) {
  ThreeBody acc{};
  for (const auto& comp : density.components(xi)) {
    const ThreeBody d = cube(projector_from_bloch(comp.state));
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += comp.weight * d[i];
  }
  const double f = density.marginal(xi);
  for (double& x : acc) x *= f;
  return acc;
}

MomentField mixture_moment_field(const ConditionalMixtureField& density, const PhaseGrid& grid,
                                 int order) {
  MomentField out(grid, order);
  parallel_for(grid.size(), [&](std::size_t k) {
    const ClassicalPoint xi = grid.node(k);
    out.F[k] = density.marginal(xi);
    if (order >= 1) out.first[k] = density.first_moment(xi);
    if (order >= 2) out.second[k] = density.second_moment(xi);
    if (order >= 3) out.third[k] = mixture_third_moment(density, xi);
  });
  return out;
}

void write_moment_field_csv(std::ostream& os, const MomentField& f) {
  os << "R,P,F_C";
  if (f.order >= 1) os << ",mu1,mu2,mu3";
  if (f.order >= 2) os << ",mu00,mu01,mu02,mu03,mu11,mu12,mu13,mu22,mu23,mu33";
  os << '\n' << std::setprecision(17);
  for (std::size_t k = 0; k < f.grid.size(); ++k) {
    const ClassicalPoint xi = f.grid.node(k);
    os << xi.R << ',' << xi.P << ',' << f.F[k];
    if (f.order >= 1) os << ',' << f.first[k][1] << ',' << f.first[k][2] << ',' << f.first[k][3];
    if (f.order >= 2)
      for (double c : f.second[k].c) os << ',' << c;
    os << '\n';
  }
}

}  // namespace hqc
