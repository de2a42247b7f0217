#include "tpns/problem.hpp"

namespace tpns {

Discretization::Discretization(const Mesh& mesh, const ModelParams& params)
    : mesh_(std::make_shared<const Mesh>(mesh)),
      params_(params),
      porous_(DofMap::build(*mesh_, SpaceKind::P1Scalar)),
      velocity_(DofMap::build(*mesh_, SpaceKind::MiniVector)),
      pressure_(DofMap::build(*mesh_, SpaceKind::P1ScalarConduit)),
      interface_edges_(edges_with_tag(*mesh_, EdgeTag::Interface)),
      natural_edges_(conduit_natural_edges(*mesh_)) {
  params_.validate();
  porous_mass_ = assemble_mass(*mesh_, porous_, 1.0);
  porous_stiffness_ = assemble_stiffness(*mesh_, porous_, 1.0);
  velocity_mass_ = assemble_mass(*mesh_, velocity_, params_.eta);
  viscous_ = assemble_conduit_viscous(*mesh_, velocity_, params_);
  divergence_ = assemble_divergence(*mesh_, velocity_, pressure_, params_.eta);
  coupling_ = assemble_interface_coupling(*mesh_, porous_, velocity_, params_, interface_edges_);
}

} // namespace tpns
