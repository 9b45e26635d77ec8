#include <cmath>

#include "catdvp/errors.hpp"
#include "catdvp/thermal.hpp"

namespace catdvp {

namespace {

void add_bond(WeightedPauliSum& h, std::size_t i, std::size_t j, double coupling) {
  for (Pauli p : {Pauli::X, Pauli::Y, Pauli::Z}) {
    PauliString s(h.n_sites());
    s.set(i, p);
    s.set(j, p);
    h.add(0.25 * coupling, std::move(s));
  }
}

}  // namespace

void ModelSpec::validate() const {
  if (!std::isfinite(j1) || !std::isfinite(j2)) throw ValidationError("model: couplings must be finite");
  if (kind == ModelKind::Chain1D) {
    if (n < 2) throw ValidationError("model: chain needs at least 2 sites");
  } else {
    if (lx < 2 || ly < 2) throw ValidationError("model: lattice needs lx, ly >= 2");
  }
}

WeightedPauliSum build_heisenberg_chain(std::size_t n, double j) {
  if (n < 2) throw SizeError("build_heisenberg_chain: need at least 2 sites");
  WeightedPauliSum h(n);
  for (std::size_t i = 0; i + 1 < n; ++i) add_bond(h, i, i + 1, j);
  return h;
}

WeightedPauliSum build_j1j2(std::size_t lx, std::size_t ly, double j2, double j1) {
  if (lx < 2 || ly < 2) throw SizeError("build_j1j2: need lx, ly >= 2");
  auto site = [lx](std::size_t x, std::size_t y) { return y * lx + x; };
  WeightedPauliSum h(lx * ly);
  for (std::size_t y = 0; y < ly; ++y)
    for (std::size_t x = 0; x + 1 < lx; ++x) add_bond(h, site(x, y), site(x + 1, y), j1);
  for (std::size_t y = 0; y + 1 < ly; ++y)
    for (std::size_t x = 0; x < lx; ++x) add_bond(h, site(x, y), site(x, y + 1), j1);
  if (j2 != 0.0) {
    for (std::size_t y = 0; y + 1 < ly; ++y)
      for (std::size_t x = 0; x + 1 < lx; ++x) {
        add_bond(h, site(x, y), site(x + 1, y + 1), j2);
        add_bond(h, site(x + 1, y), site(x, y + 1), j2);
      }
  }
  return h;
}

WeightedPauliSum build_model(const ModelSpec& spec) {
  spec.validate();
  if (spec.kind == ModelKind::Chain1D) return build_heisenberg_chain(spec.n, spec.j1);
  return build_j1j2(spec.lx, spec.ly, spec.j2, spec.j1);
}

}  // namespace catdvp
