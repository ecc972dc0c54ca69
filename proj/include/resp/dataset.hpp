// SPDX-License-Identifier: Apache-2.0
#ifndef RESP_DATASET_HPP
#define RESP_DATASET_HPP

#include <string>
#include <vector>

#include "resp/rsm.hpp"
#include "resp/signal.hpp"

namespace resp::dataset {

// One training/eval item after preprocessing: T feature values in [0,1].
struct Sample {
  std::vector<double> features;
  int label = 0;
};

// JSON-lines dataset: one object per line,
// {"label": 0-5, "rate_hz": number, "samples": [...]}.
void write_jsonl(const std::string& path, const std::vector<rsm::LabeledWaveform>& data);
std::vector<rsm::LabeledWaveform> read_jsonl(const std::string& path);

// Raw recording import: one value per line, optional non-numeric header.
std::vector<double> read_csv_signal(const std::string& path);
void write_csv_signal(const std::string& path, const std::vector<double>& samples);

std::vector<Sample> preprocess_all(const std::vector<rsm::LabeledWaveform>& data,
                                   const signal::PreprocessConfig& config);

// Writes to a temp file in the same directory, then renames into place.
void atomic_write(const std::string& path, const std::string& contents);

} // namespace resp::dataset

#endif
