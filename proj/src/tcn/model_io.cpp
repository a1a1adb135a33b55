#include "pitchstats/tcn/model_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "pitchstats/error.hpp"

static_assert(std::endian::native == std::endian::little,
              "model serialization assumes a little-endian host");

namespace pitchstats::tcn {

namespace {

using nlohmann::json;

constexpr char kMagic[4] = {'P', 'T', 'C', 'N'};
constexpr std::uint32_t kFormatVersion = 1;

json config_to_json(const TcnConfig& config, std::uint64_t seed) {
  json doc;
  doc["in_channels"] = config.in_channels;
  doc["block_channels"] = config.block_channels;
  doc["kernel_size"] = config.kernel_size;
  doc["dilations"] = config.dilations;
  doc["dropout_rate"] = config.dropout_rate;
  doc["head"] = config.head == Head::role4 ? "role4" : "binary";
  doc["seq_len"] = config.seq_len;
  doc["fc_hidden"] = config.fc_hidden;
  doc["seed"] = seed;
  return doc;
}

void config_from_json(const json& doc, TcnConfig& config, std::uint64_t& seed) {
  try {
    config.in_channels = doc.at("in_channels").get<int>();
    config.block_channels = doc.at("block_channels").get<std::vector<int>>();
    config.kernel_size = doc.at("kernel_size").get<int>();
    config.dilations = doc.at("dilations").get<std::vector<int>>();
    config.dropout_rate = doc.at("dropout_rate").get<Scalar>();
    const std::string head = doc.at("head").get<std::string>();
    if (head == "role4") {
      config.head = Head::role4;
    } else if (head == "binary") {
      config.head = Head::binary;
    } else {
      throw SchemaError("unknown model head: " + head);
    }
    config.seq_len = doc.at("seq_len").get<int>();
    config.fc_hidden = doc.at("fc_hidden").get<int>();
    seed = doc.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw SchemaError(std::string("bad model config blob: ") + e.what());
  }
}

void write_bytes(std::ofstream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

template <typename T>
void write_value(std::ofstream& out, T value) {
  write_bytes(out, &value, sizeof(T));
}

void read_bytes(std::ifstream& in, void* data, std::size_t n,
                const char* what) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(in.gcount()) != n) {
    throw ParseError(std::string("model file truncated while reading ") + what);
  }
}

template <typename T>
T read_value(std::ifstream& in, const char* what) {
  T value;
  read_bytes(in, &value, sizeof(T), what);
  return value;
}

}  // namespace

void save_model(const TcnModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open model file for writing: " + path);

  write_bytes(out, kMagic, sizeof(kMagic));
  write_value<std::uint32_t>(out, kFormatVersion);

  const std::string blob =
      config_to_json(model.config(), model.init_seed()).dump();
  write_value<std::uint64_t>(out, blob.size());
  write_bytes(out, blob.data(), blob.size());

  for (const nn::Tensor* tensor : model.state_tensors()) {
    write_value<std::uint32_t>(out, static_cast<std::uint32_t>(tensor->rank()));
    for (Index d : tensor->shape()) {
      write_value<std::uint64_t>(out, static_cast<std::uint64_t>(d));
    }
    write_bytes(out, tensor->data(),
                static_cast<std::size_t>(tensor->size()) * sizeof(Scalar));
  }
  if (!out) throw IoError("write failure on model file: " + path);
}

TcnModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file: " + path);

  char magic[4];
  read_bytes(in, magic, sizeof(magic), "magic");
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw ParseError("not a model file (bad magic): " + path);
  }
  const auto version = read_value<std::uint32_t>(in, "version");
  if (version != kFormatVersion) {
    throw SchemaError("unsupported model format version " +
                      std::to_string(version));
  }

  const auto blob_len = read_value<std::uint64_t>(in, "config length");
  if (blob_len > (1u << 20)) {
    throw ParseError("model config blob implausibly large");
  }
  std::string blob(blob_len, '\0');
  read_bytes(in, blob.data(), blob.size(), "config blob");
  json doc = json::parse(blob, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ParseError("model config blob is not JSON");

  TcnConfig config;
  std::uint64_t seed = 0;
  config_from_json(doc, config, seed);

  TcnModel model(config, seed, /*initialize=*/false);
  for (nn::Tensor* tensor : model.state_tensors()) {
    const auto rank = read_value<std::uint32_t>(in, "tensor rank");
    if (rank != static_cast<std::uint32_t>(tensor->rank())) {
      throw SchemaError("stored tensor rank does not match the config");
    }
    for (Index d : tensor->shape()) {
      const auto stored = read_value<std::uint64_t>(in, "tensor shape");
      if (stored != static_cast<std::uint64_t>(d)) {
        throw SchemaError("stored tensor shape does not match the config");
      }
    }
    read_bytes(in, tensor->data(),
               static_cast<std::size_t>(tensor->size()) * sizeof(Scalar),
               "tensor data");
  }
  char extra;
  in.read(&extra, 1);
  if (!in.eof()) throw ParseError("trailing bytes after model tensors");
  return model;
}

}  // namespace pitchstats::tcn
