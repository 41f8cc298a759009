#include "decaylab/container.hpp"

#include <openssl/evp.h>

#include <cstring>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>

#include "decaylab/error.hpp"

namespace decaylab {

using nlohmann::json;

namespace {

json domain_json(const LatticeDomain& d) {
  json center = json::array();
  for (int k = 0; k < d.dim(); ++k) center.push_back(d.center()[k]);
  return {{"dim", d.dim()}, {"center", center}, {"side", d.side()}, {"mesh", d.mesh()}, {"boundary", to_string(d.boundary())}};
}

json distribution_json(const Distribution& dist) {
  static const char* kinds[] = {"uniform01", "bernoulli", "bounded-density"};
  json j{{"kind", kinds[static_cast<int>(dist.kind())]}};
  if (dist.kind() == Distribution::Kind::Bernoulli) j["p"] = dist.p();
  if (dist.kind() == Distribution::Kind::BoundedDensity) j["bins"] = dist.bins();
  return j;
}

Distribution distribution_from(const json& j) {
  const std::string kind = j.at("kind");
  if (kind == "uniform01") return Distribution::uniform01();
  if (kind == "bernoulli") return Distribution::bernoulli(j.at("p").get<double>());
  if (kind == "bounded-density") return Distribution::bounded_density(j.at("bins").get<std::vector<double>>());
  throw FormatError("unknown distribution '" + kind + "'");
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed container: ") + e.what());
  }
}

void check_version(const json& j) {
  if (!j.contains("format_version") || j["format_version"].get<int>() != kContainerVersion) {
    throw FormatError("unsupported container format version");
  }
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 computation failed");
  }
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
  return os.str();
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

std::string domain_to_json(const LatticeDomain& domain) {
  json j = domain_json(domain);
  j["format_version"] = kContainerVersion;
  return j.dump();
}

LatticeDomain domain_from_json(const std::string& text) {
  const json j = parse(text);
  check_version(j);
  try {
    const auto center = j.at("center").get<std::vector<double>>();
    return build_domain(j.at("dim").get<int>(), center, j.at("side").get<double>(), j.at("mesh").get<double>(),
                        boundary_from_string(j.at("boundary").get<std::string>()));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad domain container: ") + e.what());
  }
}

std::string field_to_json(const DisorderField& field) {
  const SiteBox& box = field.box();
  json lo = json::array();
  json shape = json::array();
  for (int k = 0; k < box.dim; ++k) {
    lo.push_back(box.lo[k]);
    shape.push_back(box.shape[k]);
  }
  json j{{"format_version", kContainerVersion},
         {"kind", "disorder-field"},
         {"distribution", distribution_json(field.spec().distribution)},
         {"seed", field.spec().seed},
         {"realization", field.spec().realization},
         {"dim", box.dim},
         {"lo", lo},
         {"shape", shape},
         {"values", field.values()}};
  return j.dump();
}

DisorderField field_from_json(const std::string& text) {
  const json j = parse(text);
  check_version(j);
  try {
    DisorderSpec spec{distribution_from(j.at("distribution")), j.at("seed").get<std::uint64_t>(),
                      j.at("realization").get<std::uint32_t>()};
    SiteBox box;
    box.dim = j.at("dim").get<int>();
    for (int k = 0; k < box.dim; ++k) {
      box.lo[k] = j.at("lo").at(k).get<std::int64_t>();
      box.shape[k] = j.at("shape").at(k).get<std::int64_t>();
    }
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != box.size()) throw FormatError("field container has the wrong number of values");
    return DisorderField(spec, box, std::move(values));
  } catch (const json::exception& e) {
    throw FormatError(std::string("bad field container: ") + e.what());
  }
}

std::string matrix_descriptor_json(const HamiltonianMatrix& h) {
  const SparseMatrix& m = h.matrix();
  std::string bytes(reinterpret_cast<const char*>(m.valuePtr()), sizeof(double) * static_cast<std::size_t>(m.nonZeros()));
  json j{{"format_version", kContainerVersion},
         {"kind", "hamiltonian"},
         {"domain", domain_json(h.domain())},
         {"coupling", h.params().coupling},
         {"envelope", h.params().envelope.describe()},
         {"seed", h.provenance().seed},
         {"realization", h.provenance().realization},
         {"distribution", h.provenance().distribution},
         {"rows", m.rows()},
         {"nonzeros", m.nonZeros()},
         {"values_sha256", sha256_hex(bytes)}};
  return j.dump();
}

std::string summary_to_json(const SpectralSummary& s) {
  json j{{"format_version", kContainerVersion},
         {"kind", "spectral-summary"},
         {"threshold", s.threshold},
         {"window_lower", s.window_lower},
         {"count", s.count},
         {"expected", s.expected},
         {"ground_energy", s.ground_energy},
         {"energies", s.energies},
         {"residuals", s.residuals},
         {"method", to_string(s.method)},
         {"solver", s.solver},
         {"complete", s.complete},
         {"count_shifted", s.count_shifted}};
  return j.dump();
}

void write_eigenvector_sidecar(const std::filesystem::path& path, const Eigen::MatrixXd& vectors,
                               std::uint32_t realization) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::uint32_t version = kContainerVersion;
  const std::uint64_t rows = static_cast<std::uint64_t>(vectors.rows());
  const std::uint64_t cols = static_cast<std::uint64_t>(vectors.cols());
  out.write("DLEV", 4);
  out.write(reinterpret_cast<const char*>(&version), sizeof version);
  out.write(reinterpret_cast<const char*>(&realization), sizeof realization);
  out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
  out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
  out.write(reinterpret_cast<const char*>(vectors.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
}

Eigen::MatrixXd read_eigenvector_sidecar(const std::filesystem::path& path, std::uint32_t* realization) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::uint32_t real = 0;
  std::uint64_t rows = 0;
  std::uint64_t cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof version);
  in.read(reinterpret_cast<char*>(&real), sizeof real);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, "DLEV", 4) != 0 || version != kContainerVersion) {
    throw FormatError("not an eigenvector sidecar: " + path.string());
  }
  Eigen::MatrixXd v(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * rows * cols));
  if (!in) throw FormatError("truncated eigenvector sidecar: " + path.string());
  if (realization) *realization = real;
  return v;
}

}  // namespace decaylab
