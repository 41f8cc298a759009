#include "decaylab/hamiltonian.hpp"

#include <cmath>

#include "decaylab/error.hpp"

namespace decaylab {

HamiltonianMatrix::HamiltonianMatrix(SparseMatrix matrix, LatticeDomain domain, ModelParams params,
                                     std::vector<double> potential, Provenance provenance)
    : matrix_(std::move(matrix)),
      domain_(std::move(domain)),
      params_(std::move(params)),
      potential_(std::move(potential)),
      provenance_(std::move(provenance)) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(matrix_.rows());
  for (int c = 0; c < matrix_.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(matrix_, c); it; ++it) rows[it.row()] += std::abs(it.value());
  }
  norm_bound_ = rows.size() ? rows.maxCoeff() : 0.0;
}

namespace {

void laplacian_triplets(const LatticeDomain& domain, const std::vector<double>* potential,
                        std::vector<Eigen::Triplet<double, int>>& out) {
  const int d = domain.dim();
  const double inv_h2 = 1.0 / (domain.mesh() * domain.mesh());
  const auto& shape = domain.shape();
  out.reserve(domain.size() * (2 * d + 1));
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const auto node = domain.node(i);
    int neighbours = 0;
    for (int k = 0; k < d; ++k) {
      for (int step : {-1, +1}) {
        auto nb = node;
        nb[k] += step;
        if (nb[k] < 0 || nb[k] >= shape[k]) continue;
        ++neighbours;
        out.emplace_back(static_cast<int>(i), static_cast<int>(domain.index(nb)), -inv_h2);
      }
    }
    const double kinetic =
        domain.boundary() == Boundary::Dirichlet ? 2.0 * d * inv_h2 : static_cast<double>(neighbours) * inv_h2;
    const double v = potential ? (*potential)[i] : 0.0;
    out.emplace_back(static_cast<int>(i), static_cast<int>(i), kinetic + v);
  }
}

SparseMatrix from_triplets(const LatticeDomain& domain, const std::vector<Eigen::Triplet<double, int>>& t) {
  const auto n = static_cast<int>(domain.size());
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

SparseMatrix discrete_laplacian(const LatticeDomain& domain) {
  std::vector<Eigen::Triplet<double, int>> t;
  laplacian_triplets(domain, nullptr, t);
  return from_triplets(domain, t);
}

std::vector<double> sample_potential(const ModelParams& params, const LatticeDomain& domain,
                                     const DisorderField& field, const SingleSitePotential& u) {
  if (!(params.coupling >= 0.0)) throw PreconditionError("coupling lambda must be non-negative");
  const int d = domain.dim();
  std::vector<double> v(domain.size(), 0.0);
  if (params.envelope.general_spec() != nullptr) params.envelope.check_witness(domain);
  for (std::size_t i = 0; i < domain.size(); ++i) {
    const Point x = domain.coordinate(i);
    const Site j = enclosing_site(x, d);
    if (params.region) {
      const auto& region = *params.region;
      if (region.rule == ImpurityRule::RestrictToBox && !region.box.contains(x)) continue;
      if (region.rule == ImpurityRule::SitesInBox) {
        Point site_point{0.0, 0.0, 0.0};
        for (int k = 0; k < d; ++k) site_point[k] = static_cast<double>(j[k]);
        if (!region.box.contains(site_point)) continue;
      }
    }
    Point offset{0.0, 0.0, 0.0};
    for (int k = 0; k < d; ++k) offset[k] = x[k] - static_cast<double>(j[k]);
    const double bump = u.value(offset, d);
    if (bump == 0.0) continue;
    const double omega = field.at(j);
    if (omega == 0.0 || params.coupling == 0.0) continue;
    v[i] = -params.coupling * params.envelope.value(x, d) * omega * bump;
  }
  return v;
}

HamiltonianMatrix assemble_hamiltonian(const ModelParams& params, const LatticeDomain& domain,
                                       const DisorderField& field, const SingleSitePotential& u) {
  auto potential = sample_potential(params, domain, field, u);
  std::vector<Eigen::Triplet<double, int>> t;
  laplacian_triplets(domain, &potential, t);
  Provenance prov{field.spec().seed, field.spec().realization, field.spec().distribution.name()};
  return HamiltonianMatrix(from_triplets(domain, t), domain, params, std::move(potential), std::move(prov));
}

HamiltonianMatrix restricted_operator(const ModelSpec& model, const LatticeDomain& box, std::uint64_t seed,
                                      std::uint32_t realization) {
  ModelParams params{model.envelope, model.coupling, PotentialRegion{box.cube(), ImpurityRule::RestrictToBox}};
  const DisorderSpec spec{model.distribution, seed, realization};
  return assemble_hamiltonian(params, box, sample_disorder(spec, sites_covering(box)), model.single_site);
}

HamiltonianMatrix embedded_operator(const ModelSpec& model, const LatticeDomain& box, double buffer,
                                    ImpurityRule rule, std::uint64_t seed, std::uint32_t realization) {
  const LatticeDomain computational = box.with_buffer(buffer);
  ModelParams params{model.envelope, model.coupling, PotentialRegion{box.cube(), rule}};
  const DisorderSpec spec{model.distribution, seed, realization};
  return assemble_hamiltonian(params, computational, sample_disorder(spec, sites_covering(computational)),
                              model.single_site);
}

}  // namespace decaylab
