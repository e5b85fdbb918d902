#ifndef QSEP_DATASET_IO_HPP
#define QSEP_DATASET_IO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsep/datagen.hpp"

namespace qsep {

/// Load failure; the message names the offending line and record.
struct dataset_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// JSON-Lines dataset: line 1 is the header, each further line one sample.
/// Floats are serialized with 17 significant digits, so write -> read ->
/// write reproduces identical bytes.
struct DatasetHeader {
  int format_version = 1;
  BipartiteDims dims;
  // Unix seconds; honors SOURCE_DATE_EPOCH, otherwise 0 ("unset") so that
  // reruns of the same seed produce byte-identical files.
  std::int64_t created = 0;
  std::uint64_t master_seed = 0;
  std::string generator_config = "{}";  // verbatim JSON echo of the generation flags
};

std::int64_t resolve_created_timestamp();

struct Dataset {
  DatasetHeader header;
  std::vector<LabeledSample> samples;
};

/// Atomic write (temp file + rename). Requires homogeneous dims.
void dataset_write(const std::string& path, const DatasetHeader& header,
                   const std::vector<LabeledSample>& samples);

/// Parses and validates every record: density-matrix invariants, dims
/// matching the header, witness presence iff PPT_ENT, and the per-label PPT
/// facts (NPPT_ENT fails the PPT test, the others pass it, PPT_ENT witnesses
/// detect their state). Fails fast on the first violation, naming the line.
/// The full 10^4-sample witness revalidation is not rerun here; the
/// witness-check CLI command covers that.
Dataset dataset_read(const std::string& path);

}  // namespace qsep

#endif
