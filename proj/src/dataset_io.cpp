#include "qsep/dataset_io.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#if __has_include(<nlohmann/json.hpp>)
#include <nlohmann/json.hpp>
#else
#include <json.hpp>  // vendored single header
#endif

#include "qsep/criteria.hpp"
#include "qsep/io_util.hpp"

namespace qsep {

using nlohmann::json;

std::int64_t resolve_created_timestamp() {
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    return std::strtoll(env, nullptr, 10);
  }
  return 0;
}

namespace {

void append_matrix(std::string& out, const Matrix& m) {
  out += '[';
  const int p = static_cast<int>(m.rows());
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (i != 0 || j != 0) out += ',';
      out += '[';
      out += format_double17(m(i, j).real());
      out += ',';
      out += format_double17(m(i, j).imag());
      out += ']';
    }
  }
  out += ']';
}

Matrix parse_matrix(const json& arr, int p, int line_no) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != p * p) {
    throw dataset_error("line " + std::to_string(line_no) + ": matrix must have p^2 [re, im] pairs");
  }
  Matrix m(p, p);
  for (int idx = 0; idx < p * p; ++idx) {
    const auto& pair = arr[idx];
    if (!pair.is_array() || pair.size() != 2) {
      throw dataset_error("line " + std::to_string(line_no) + ": matrix entry is not an [re, im] pair");
    }
    m(idx / p, idx % p) = cxd(pair[0].get<double>(), pair[1].get<double>());
  }
  return m;
}

void append_sample_line(std::string& out, const LabeledSample& s) {
  out += "{\"id\":\"" + s.id + "\",\"label\":\"" + to_string(s.label) + "\",\"matrix\":";
  append_matrix(out, s.rho.entries);
  out += ",\"witness\":";
  if (s.witness) {
    append_matrix(out, s.witness->matrix);
  } else {
    out += "null";
  }
  out += ",\"provenance\":{\"seed\":" + std::to_string(s.provenance.seed);
  out += ",\"generator\":\"" + to_string(s.provenance.generator) + "\"";
  out += ",\"k_or_r\":" + std::to_string(s.provenance.k_or_r);
  out += ",\"parent_id\":";
  if (s.provenance.parent_id) {
    out += "\"" + *s.provenance.parent_id + "\"";
  } else {
    out += "null";
  }
  out += "}}\n";
}

void validate_sample(const LabeledSample& s, int line_no) {
  auto fail = [&](const std::string& what) {
    throw dataset_error("line " + std::to_string(line_no) + " (" + s.id + "): " + what);
  };
  try {
    validate_density(s.rho);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if (s.witness.has_value() != (s.label == ClassLabel::PPT_ENT)) {
    fail("witness must be present exactly for PPT_ENT samples");
  }
  const auto ppt = ppt_check(s.rho);
  switch (s.label) {
    case ClassLabel::NPPT_ENT:
      if (ppt.verdict != Verdict::ENTANGLED) fail("NPPT_ENT sample passes the PPT test");
      break;
    case ClassLabel::SEP:
      if (ppt.verdict == Verdict::ENTANGLED) fail("SEP sample fails the PPT test");
      if (s.provenance.generator != Generator::SEPARABLE_CONSTRUCTION) {
        fail("SEP sample does not carry a separable-construction certificate");
      }
      break;
    case ClassLabel::PPT_ENT: {
      if (ppt.verdict == Verdict::ENTANGLED) fail("PPT_ENT sample fails the PPT test");
      try {
        validate_witness_shape(*s.witness);
      } catch (const std::exception& e) {
        fail(e.what());
      }
      if (witness_value(*s.witness, s.rho) >= 0.0) fail("stored witness does not detect the sample");
      break;
    }
  }
}

}  // namespace

void dataset_write(const std::string& path, const DatasetHeader& header,
                   const std::vector<LabeledSample>& samples) {
  for (const auto& s : samples) {
    if (s.rho.dims != header.dims) {
      throw std::invalid_argument("dataset_write: sample dims differ from header dims");
    }
  }
  std::string out = "{\"format_version\":" + std::to_string(header.format_version);
  out += ",\"dims\":{\"p_a\":" + std::to_string(header.dims.p_a) +
         ",\"p_b\":" + std::to_string(header.dims.p_b) + "}";
  out += ",\"created\":" + std::to_string(header.created);
  out += ",\"master_seed\":" + std::to_string(header.master_seed);
  out += ",\"generator_config\":" + (header.generator_config.empty() ? "{}" : header.generator_config);
  out += "}\n";
  for (const auto& s : samples) append_sample_line(out, s);
  atomic_write_file(path, out);
}

Dataset dataset_read(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw dataset_error("cannot open dataset " + path);

  std::string line;
  if (!std::getline(f, line)) throw dataset_error("dataset is empty (missing header line)");
  Dataset ds;
  try {
    json h = json::parse(line);
    ds.header.format_version = h.at("format_version").get<int>();
    if (ds.header.format_version != 1) {
      throw dataset_error("unsupported format_version " + std::to_string(ds.header.format_version));
    }
    ds.header.dims = BipartiteDims(h.at("dims").at("p_a").get<int>(), h.at("dims").at("p_b").get<int>());
    ds.header.created = h.at("created").get<std::int64_t>();
    ds.header.master_seed = h.at("master_seed").get<std::uint64_t>();
    ds.header.generator_config = h.at("generator_config").dump();
  } catch (const dataset_error&) {
    throw;
  } catch (const std::exception& e) {
    throw dataset_error(std::string("line 1: malformed header: ") + e.what());
  }

  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty()) continue;
    LabeledSample s;
    try {
      json j = json::parse(line);
      s.id = j.at("id").get<std::string>();
      s.label = class_label_from_string(j.at("label").get<std::string>());
      s.rho = DensityMatrix{parse_matrix(j.at("matrix"), ds.header.dims.p(), line_no), ds.header.dims};
      if (!j.at("witness").is_null()) {
        s.witness = Witness{parse_matrix(j.at("witness"), ds.header.dims.p(), line_no),
                            ds.header.dims, 0.0};
      }
      const json& prov = j.at("provenance");
      s.provenance.seed = prov.at("seed").get<std::uint64_t>();
      s.provenance.generator = generator_from_string(prov.at("generator").get<std::string>());
      s.provenance.k_or_r = prov.at("k_or_r").get<int>();
      if (!prov.at("parent_id").is_null()) {
        s.provenance.parent_id = prov.at("parent_id").get<std::string>();
      }
    } catch (const dataset_error&) {
      throw;
    } catch (const std::exception& e) {
      throw dataset_error("line " + std::to_string(line_no) + ": malformed record: " + e.what());
    }
    validate_sample(s, line_no);
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

}  // namespace qsep
