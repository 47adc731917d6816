#include "inls/checkpoint.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <ctime>
#include <fstream>

namespace inls {

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(bytes[i], bytes[sizeof(T) - 1 - i]);
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

template <typename T>
void put(std::ostream& os, T value) {
  value = to_little(value);
  os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  T value;
  if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw IoError("checkpoint '" + path + "' is truncated");
  }
  return to_little(value);
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void write_checkpoint(const std::string& path, const Field& f, const CheckpointInfo& info) {
  const Grid& g = f.grid();
  {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open checkpoint '" + path + "' for writing");
    os.write(kCheckpointMagic, sizeof kCheckpointMagic);
    put<std::uint32_t>(os, kCheckpointVersion);
    put<std::uint32_t>(os, 0);
    put<std::int64_t>(os, g.dim());
    for (int d = 0; d < g.dim(); ++d) put<std::int64_t>(os, g.points());
    put<double>(os, g.half_width());
    put<double>(os, f.params().b());
    for (const Complex& z : f.values()) {
      put<double>(os, z.real());
      put<double>(os, z.imag());
    }
    if (!os) throw IoError("failed writing checkpoint '" + path + "'");
  }

  nlohmann::json meta = {
      {"format", "inls-checkpoint"},
      {"version", kCheckpointVersion},
      {"N", g.dim()},
      {"M", std::vector<Index>(g.dim(), g.points())},
      {"L", g.half_width()},
      {"b", f.params().b()},
      {"created", utc_now()},
      {"run_id", info.run_id},
      {"t", info.t},
      {"step", info.step},
  };
  std::ofstream js(path + ".json", std::ios::trunc);
  if (!js) throw IoError("cannot write checkpoint sidecar '" + path + ".json'");
  js << meta.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open checkpoint '" + path + "'");

  char magic[8];
  if (!is.read(magic, sizeof magic) || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) {
    throw IoError("'" + path + "' is not a checkpoint (bad magic)");
  }
  const auto version = get<std::uint32_t>(is, path);
  get<std::uint32_t>(is, path);
  if (version != kCheckpointVersion) {
    throw IoError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto dim = get<std::int64_t>(is, path);
  if (dim < 1 || dim > 3) throw IoError("checkpoint dimension out of range");
  std::int64_t points = -1;
  for (std::int64_t d = 0; d < dim; ++d) {
    const auto m = get<std::int64_t>(is, path);
    if (points >= 0 && m != points) throw IoError("checkpoint has unequal axis sizes");
    points = m;
  }
  const auto half_width = get<double>(is, path);
  const auto b = get<double>(is, path);

  ProblemParams params(static_cast<int>(dim), b);
  Grid grid(static_cast<int>(dim), half_width, points);
  Eigen::ArrayXcd values(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double re = get<double>(is, path);
    const double im = get<double>(is, path);
    values(i) = Complex(re, im);
  }
  if (is.peek() != std::char_traits<char>::eof()) {
    throw IoError("checkpoint '" + path + "' has trailing bytes");
  }

  nlohmann::json sidecar;
  std::ifstream js(path + ".json");
  if (!js) throw IoError("checkpoint sidecar '" + path + ".json' is missing");
  try {
    js >> sidecar;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("checkpoint sidecar unreadable: " + std::string(e.what()));
  }
  if (sidecar.value("N", -1) != dim || sidecar.value("L", -1.0) != half_width ||
      sidecar.value("b", -1.0) != b) {
    throw IoError("checkpoint sidecar metadata does not match '" + path + "'");
  }
  return Checkpoint{Field(params, grid, std::move(values)), std::move(sidecar)};
}

}  // namespace inls
