#include "opcorrect/surrogate/workflow.hpp"

#include "opcorrect/surrogate/derivative_basis.hpp"
#include "opcorrect/surrogate/pod.hpp"

#include <algorithm>

namespace opcorrect::surrogate {

BasisBuild build_reduced_basis(const model::ReactionDiffusion& model, const Vector& prior_mean,
                               const std::vector<Vector>& ms, const std::vector<Vector>& us,
                               const BasisOptions& o, RngStream& rng) {
  require(!ms.empty() && ms.size() == us.size(), "build_reduced_basis: need matching parameter/state samples");
  BasisBuild out;
  const PodResult pod = compute_pod(us, model.mass(), o.r_out);
  const std::size_t nb = std::min<std::size_t>(ms.size(), static_cast<std::size_t>(std::max(1, o.n_basis_samples)));
  const std::vector<Vector> bm(ms.begin(), ms.begin() + static_cast<long>(nb));
  const std::vector<Vector> bu(us.begin(), us.begin() + static_cast<long>(nb));
  const DerivativeBasis dis = compute_derivative_basis(model, bm, bu, o.r_in, o.oversample, rng, o.jobs);
  out.linear_solves = dis.linear_solves + dis.forward_solves;

  ReducedBasis& b = out.basis;
  b.input_basis = dis.basis;
  b.input_eigenvalues = dis.eigenvalues;
  b.input_mean = prior_mean;
  b.output_basis = pod.basis;
  b.output_mean = pod.mean;
  b.output_eigenvalues = pod.eigenvalues;
  b.input_scales = Vector::Ones(o.r_in);
  b.bind(model.mass());
  b.fit_input_scales(ms);
  return out;
}

TrainingSet make_training_set(const ReducedBasis& basis, const std::vector<Vector>& ms,
                              const std::vector<Vector>& us) {
  require(ms.size() == us.size(), "make_training_set: count mismatch");
  return {basis.encode_inputs(ms), basis.encode_outputs(us)};
}

} // namespace opcorrect::surrogate
