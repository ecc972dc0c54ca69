// SPDX-License-Identifier: Apache-2.0
#include "resp/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <sstream>

#include "resp/dataset.hpp"

namespace resp::checkpoint {

namespace {

constexpr char kMagic[8] = {'R', 'E', 'S', 'P', 'C', 'K', 'P', '1'};
constexpr std::uint32_t kVersion = 1;

// Little-endian on-disk layout; see docs/checkpoint.md.
template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

struct Reader {
  const std::string& buf;
  std::size_t pos = 0;

  template <typename T>
  T get() {
    if (pos + sizeof(T) > buf.size()) throw Truncated("checkpoint truncated");
    T value;
    std::memcpy(&value, buf.data() + pos, sizeof(T));
    pos += sizeof(T);
    return value;
  }
};

void put_arrays(std::string& out, nn::ModelParams& m) {
  for (auto& r : nn::param_refs(m)) {
    put<std::uint64_t>(out, r.size);
    const std::size_t bytes = r.size * sizeof(double);
    const std::size_t start = out.size();
    out.resize(start + bytes);
    std::memcpy(out.data() + start, r.data, bytes);
  }
}

void get_arrays(Reader& in, nn::ModelParams& m) {
  for (auto& r : nn::param_refs(m)) {
    const auto count = in.get<std::uint64_t>();
    if (count != r.size) {
      std::ostringstream msg;
      msg << "checkpoint shape mismatch for " << r.name << ": expected " << r.size
          << " values, found " << count;
      throw BadCheckpoint(msg.str());
    }
    const std::size_t bytes = r.size * sizeof(double);
    if (in.pos + bytes > in.buf.size()) throw Truncated("checkpoint truncated");
    std::memcpy(r.data, in.buf.data() + in.pos, bytes);
    in.pos += bytes;
  }
}

} // namespace

void save(const std::string& path, const Checkpoint& ckpt) {
  std::string out;
  out.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.model.arch));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.model.dims.D));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.model.dims.H));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.model.dims.A));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.model.dims.C));
  put<std::uint64_t>(out, ckpt.train_step);
  put<std::uint64_t>(out, ckpt.seed);
  put<std::uint8_t>(out, ckpt.optimizer.has_value() ? 1 : 0);

  auto model = ckpt.model; // param_refs needs mutable access
  put_arrays(out, model);
  if (ckpt.optimizer) {
    put<std::int64_t>(out, ckpt.optimizer->step);
    auto m = ckpt.optimizer->m;
    auto v = ckpt.optimizer->v;
    put_arrays(out, m);
    put_arrays(out, v);
  }
  dataset::atomic_write(path, out);
}

Checkpoint load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadCheckpoint("cannot open checkpoint: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  const std::string buf = ss.str();

  Reader r{buf};
  if (buf.size() < sizeof(kMagic) ||
      std::memcmp(buf.data(), kMagic, sizeof(kMagic)) != 0)
    throw BadCheckpoint("not a checkpoint: " + path);
  r.pos = sizeof(kMagic);
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw VersionMismatch("unsupported checkpoint version " + std::to_string(version));

  const auto arch_raw = r.get<std::uint32_t>();
  if (arch_raw > 3) throw BadCheckpoint("invalid architecture tag");
  const auto arch = static_cast<nn::Arch>(arch_raw);
  nn::Dims dims;
  dims.D = r.get<std::uint32_t>();
  dims.H = r.get<std::uint32_t>();
  dims.A = r.get<std::uint32_t>();
  dims.C = r.get<std::uint32_t>();

  Checkpoint ckpt;
  ckpt.train_step = r.get<std::uint64_t>();
  ckpt.seed = r.get<std::uint64_t>();
  const bool has_opt = r.get<std::uint8_t>() != 0;

  std::mt19937_64 dummy(0);
  ckpt.model = nn::init_params(arch, dims, dummy); // allocates the right shapes
  get_arrays(r, ckpt.model);
  if (has_opt) {
    nn::AdamState state = nn::make_adam_state(ckpt.model);
    state.step = r.get<std::int64_t>();
    get_arrays(r, state.m);
    get_arrays(r, state.v);
    ckpt.optimizer = std::move(state);
  }
  if (r.pos != buf.size()) throw BadCheckpoint("trailing bytes in checkpoint");
  return ckpt;
}

} // namespace resp::checkpoint
