#include "ristap/filter_fp.hpp"

#include <stdexcept>

namespace ristap {

CVector mvdr_filter_from_echoes(const CVector& y_t, const CVector& y_c, Real sigma_r2) {
  if (y_t.norm() == 0.0) {
    throw std::invalid_argument("mvdr_filter: target response is zero, filter undefined");
  }
  if (sigma_r2 <= 0.0) throw std::invalid_argument("mvdr_filter: noise power must be positive");
  // (sigma^2 I + u u^H)^{-1} v = v/sigma^2 - u (u^H v) / (sigma^2 (sigma^2 + ||u||^2))
  const Complex uv = y_c.dot(y_t);
  CVector u = y_t / sigma_r2;
  if (y_c.size() > 0 && y_c.norm() > 0.0) {
    u -= y_c * (uv / (sigma_r2 * (sigma_r2 + y_c.squaredNorm())));
  }
  return u / u.squaredNorm();
}

CVector mvdr_filter(const StackedModel& model, const CVector& x, const CVector& phi,
                    Real sigma_r2) {
  return mvdr_filter_from_echoes(model.apply_target(x, phi), model.apply_clutter(x, phi),
                                 sigma_r2);
}

Real dinkelbach_eta(const StackedModel& model, const CVector& x, const CVector& phi,
                    const CVector& w, Real sigma_r2) {
  return model.scnr(x, phi, w, sigma_r2);
}

}  // namespace ristap
