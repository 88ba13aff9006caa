// SPDX-License-Identifier: Apache-2.0
#include "kbgen/model/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kbgen/errors.hpp"

namespace kbgen::model {

namespace {

constexpr char kMagic[8] = {'K', 'B', 'G', 'E', 'N', 'C', 'K', 'P'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint IO assumes a little-endian host");

template <typename T>
void write_pod(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof(T))) throw DataError(std::string("truncated checkpoint: ") + what);
  return v;
}

std::string_view bytes_of(const Mat& m) {
  return {reinterpret_cast<const char*>(m.data()), static_cast<std::size_t>(m.size()) * sizeof(Real)};
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

std::uint64_t parameter_hash(const Store& store) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < store.size(); ++i) h = fnv1a(bytes_of(store[static_cast<ParamId>(i)]), h);
  return h;
}

void save_checkpoint(const std::filesystem::path& path, const ModelParams& params, const nlohmann::json& metadata) {
  const auto& store = params.store();
  nlohmann::json shapes = nlohmann::json::array();
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto& m = store[static_cast<ParamId>(i)];
    shapes.push_back({{"name", store.name(static_cast<ParamId>(i))}, {"rows", m.rows()}, {"cols", m.cols()}});
  }
  const nlohmann::json header = {{"config", params.config().to_json()},
                                 {"lexicon", params.lexicon().to_json()},
                                 {"lexicon_hash", hex64(params.lexicon().fingerprint())},
                                 {"parameter_hash", hex64(parameter_hash(store))},
                                 {"parameters", shapes},
                                 {"metadata", metadata}};
  const std::string text = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path.string() + "'");
  out.write(kMagic, sizeof(kMagic));
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint64_t>(out, text.size());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  for (std::size_t i = 0; i < store.size(); ++i) {
    const auto b = bytes_of(store[static_cast<ParamId>(i)]);
    out.write(b.data(), static_cast<std::streamsize>(b.size()));
  }
  if (!out) throw DataError("failed while writing checkpoint '" + path.string() + "'");
}

namespace {

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path.string() + "'");
  char magic[8];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("'" + path.string() + "' is not a checkpoint");
  }
  const auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kVersion) throw DataError("unsupported checkpoint version " + std::to_string(version));
  const auto length = read_pod<std::uint64_t>(in, "header length");
  if (length > (1ull << 32)) throw DataError("implausible checkpoint header length");
  std::string text(length, '\0');
  if (!in.read(text.data(), static_cast<std::streamsize>(length))) throw DataError("truncated checkpoint header");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("corrupt checkpoint header: ") + e.what());
  }
  auto config = ModelConfig::from_json(header.at("config"));
  auto lexicon = Lexicon::from_json(header.at("lexicon"));
  if (hex64(lexicon.fingerprint()) != header.at("lexicon_hash").get<std::string>()) {
    throw DataError("checkpoint lexicon hash mismatch");
  }
  Checkpoint ck{ModelParams(config, lexicon), header.value("metadata", nlohmann::json::object())};
  auto& store = ck.params.store();
  const auto& shapes = header.at("parameters");
  if (shapes.size() != store.size()) throw DataError("checkpoint parameter count does not match its config");
  for (std::size_t i = 0; i < store.size(); ++i) {
    auto& m = store[static_cast<ParamId>(i)];
    const auto& s = shapes[i];
    if (s.at("name").get<std::string>() != store.name(static_cast<ParamId>(i)) ||
        s.at("rows").get<Index>() != m.rows() || s.at("cols").get<Index>() != m.cols()) {
      throw DataError("checkpoint parameter " + std::to_string(i) + " ('" + s.at("name").get<std::string>() +
                      "') does not match the expected '" + store.name(static_cast<ParamId>(i)) + "' " +
                      numkit::shape_of(m));
    }
    if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(Real)))) {
      throw DataError("truncated checkpoint data for '" + store.name(static_cast<ParamId>(i)) + "'");
    }
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes after checkpoint data");
  if (hex64(parameter_hash(store)) != header.at("parameter_hash").get<std::string>()) {
    throw DataError("checkpoint parameter hash mismatch");
  }
  return ck;
}

}  // namespace

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  try {
    return read_checkpoint(path);
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed checkpoint header in '" + path.string() + "': " + e.what());
  }
}

}  // namespace kbgen::model
