#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>

#include "decaylab/container.hpp"
#include "decaylab/error.hpp"
#include "decaylab/spectral.hpp"

using namespace decaylab;

TEST(Container, DomainRoundTrip) {
  const double centre[2] = {1.5, -2.0};
  const auto dom = build_domain(2, centre, 8.0, 0.5, Boundary::Neumann);
  EXPECT_EQ(domain_from_json(domain_to_json(dom)), dom);
}

TEST(Container, FieldRoundTrip) {
  const SiteBox box{1, {-5, 0, 0}, {11, 1, 1}};
  const auto field = sample_disorder({Distribution::bounded_density({1.0, 3.0}), 99, 4}, box);
  const auto back = field_from_json(field_to_json(field));
  EXPECT_EQ(back.values(), field.values());
  EXPECT_EQ(back.spec().seed, 99u);
  EXPECT_EQ(back.spec().realization, 4u);
  EXPECT_EQ(back.spec().distribution, field.spec().distribution);
}

TEST(Container, MatrixDescriptorDigestIsReproducible) {
  ModelSpec model;
  model.coupling = 3.0;
  const auto dom = build_domain(1, 16.0, 0.25, Boundary::Dirichlet);
  const auto a = nlohmann::json::parse(matrix_descriptor_json(restricted_operator(model, dom, 5, 1)));
  const auto b = nlohmann::json::parse(matrix_descriptor_json(restricted_operator(model, dom, 5, 1)));
  const auto c = nlohmann::json::parse(matrix_descriptor_json(restricted_operator(model, dom, 5, 2)));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(Container, SidecarRoundTripAndCorruption) {
  const auto path = std::filesystem::temp_directory_path() / "decaylab_sidecar_test.dlev";
  Eigen::MatrixXd v = Eigen::MatrixXd::Random(37, 3);
  write_eigenvector_sidecar(path, v, 12);
  std::uint32_t realization = 0;
  const Eigen::MatrixXd back = read_eigenvector_sidecar(path, &realization);
  EXPECT_EQ(realization, 12u);
  EXPECT_EQ(back, v);
  std::filesystem::resize_file(path, 40);
  EXPECT_THROW(read_eigenvector_sidecar(path), FormatError);
  std::filesystem::remove(path);
}

TEST(Container, SummaryJsonOmitsVectors) {
  SpectralSummary s;
  s.energies = {-2.0, -1.0};
  s.residuals = {1e-12, 2e-12};
  s.vectors = Eigen::MatrixXd::Identity(2, 2);
  const auto j = nlohmann::json::parse(summary_to_json(s));
  EXPECT_EQ(j["energies"].size(), 2u);
  EXPECT_FALSE(j.contains("vectors"));
}

TEST(Container, Sha256KnownAnswer) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
