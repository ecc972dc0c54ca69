// SPDX-License-Identifier: Apache-2.0
#include "resp/dataset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace resp::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string temp_path_for(const std::string& path) {
  return path + ".tmp";
}

void rename_into_place(const std::string& tmp, const std::string& path) {
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp + " to " + path + ": " + ec.message());
  }
}

} // namespace

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  rename_into_place(tmp, path);
}

void write_jsonl(const std::string& path, const std::vector<rsm::LabeledWaveform>& data) {
  const std::string tmp = temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp);
    for (const auto& item : data) {
      json rec;
      rec["label"] = static_cast<int>(item.label);
      rec["rate_hz"] = item.waveform.sample_rate_hz;
      rec["samples"] = item.waveform.samples;
      out << rec.dump() << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  rename_into_place(tmp, path);
}

std::vector<rsm::LabeledWaveform> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::vector<rsm::LabeledWaveform> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    const int label = rec.at("label").get<int>();
    if (label < 0 || label >= rsm::kNumPatterns)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": label out of range");
    rsm::LabeledWaveform item;
    item.label = static_cast<rsm::RespiratoryPattern>(label);
    item.waveform.sample_rate_hz = rec.at("rate_hz").get<double>();
    item.waveform.samples = rec.at("samples").get<std::vector<double>>();
    if (item.waveform.samples.empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": empty samples");
    out.push_back(std::move(item));
  }
  return out;
}

std::vector<double> read_csv_signal(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open signal file: " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      out.push_back(std::stod(line));
    } catch (const std::exception&) {
      if (first) { first = false; continue; } // header row
      throw std::runtime_error("bad numeric value in " + path + ": " + line);
    }
    first = false;
  }
  if (out.empty()) throw std::runtime_error("no samples in " + path);
  return out;
}

void write_csv_signal(const std::string& path, const std::vector<double>& samples) {
  std::ostringstream ss;
  ss.precision(17);
  for (double v : samples) ss << v << '\n';
  atomic_write(path, ss.str());
}

std::vector<Sample> preprocess_all(const std::vector<rsm::LabeledWaveform>& data,
                                   const signal::PreprocessConfig& config) {
  std::vector<Sample> out;
  out.reserve(data.size());
  for (const auto& item : data) {
    Sample s;
    s.features = signal::preprocess(item.waveform, config);
    s.label = static_cast<int>(item.label);
    out.push_back(std::move(s));
  }
  return out;
}

} // namespace resp::dataset
