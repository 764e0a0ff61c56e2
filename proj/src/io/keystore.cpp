/*
 * Copyright 2026 The hefine Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "hefine/io/keystore.hpp"

#include <charconv>
#include <sstream>

#include "hefine/ckks/serialize.hpp"
#include "hefine/common/error.hpp"
#include "hefine/io/features.hpp"

namespace hefine::io {

namespace fs = std::filesystem;

std::map<std::string, std::string> parse_manifest(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": expected key=value");
    }
    if (!out.emplace(line.substr(0, eq), line.substr(eq + 1)).second) {
      throw FormatError("manifest line " + std::to_string(lineno) + ": duplicate key '" + line.substr(0, eq) + "'");
    }
  }
  return out;
}

std::string format_manifest(const std::vector<std::pair<std::string, std::string>>& entries) {
  std::string s;
  for (const auto& [k, v] : entries) s += k + "=" + v + "\n";
  return s;
}

namespace {

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

const std::string& field(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw FormatError("key manifest: missing '" + key + "'");
  return it->second;
}

ckks::ContextPtr context_from_manifest(const fs::path& dir) {
  const auto bytes = read_file(dir / kKeyManifestFile);
  const auto m = parse_manifest(std::string(bytes.begin(), bytes.end()));
  if (field(m, "format") != "hefine-keys" || field(m, "version") != "1") {
    throw FormatError("key manifest: unsupported format");
  }
  ckks::SecurityProfile profile;
  try {
    profile = ckks::parse_profile(field(m, "profile"));
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("key manifest: ") + e.what());
  }
  auto ctx = ckks::Context::create(ckks::make_params(profile));
  const auto& h = field(m, "params_hash");
  std::uint64_t declared = 0;
  const char* first = h.data() + (h.starts_with("0x") ? 2 : 0);
  if (std::from_chars(first, h.data() + h.size(), declared, 16).ec != std::errc{}) {
    throw FormatError("key manifest: bad params_hash");
  }
  if (declared != ctx->hash()) {
    throw ParamsMismatch("key directory was generated with parameters " + h + ", this build derives " +
                         hex64(ctx->hash()) + " for profile " + field(m, "profile"));
  }
  return ctx;
}

}  // namespace

void save_keys(const fs::path& dir, const ckks::Context& ctx, const ckks::KeyBundle& keys, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  write_file(dir / kSecretKeyFile, ckks::serialize(ctx, keys.sk));
  write_file(dir / kPublicKeyFile, ckks::serialize(ctx, keys.pk));
  write_file(dir / kEvalKeyFile, ckks::serialize(ctx, keys.evk));
  write_file(dir / kRotationKeyFile, ckks::serialize(ctx, keys.rotations));
  std::string steps;
  for (long s : keys.rotations.steps()) steps += (steps.empty() ? "" : ",") + std::to_string(s);
  const auto text = format_manifest({
      {"format", "hefine-keys"},
      {"version", "1"},
      {"profile", std::string(ckks::profile_name(ctx.params().profile))},
      {"params_hash", hex64(ctx.hash())},
      {"ring_degree", std::to_string(ctx.degree())},
      {"levels", std::to_string(ctx.max_level())},
      {"seed", std::to_string(seed)},
      {"rotation_steps", steps},
  });
  write_file(dir / kKeyManifestFile, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

KeyDir load_public_keys(const fs::path& dir) {
  KeyDir out;
  out.ctx = context_from_manifest(dir);
  const auto& ctx = *out.ctx;
  out.keys.pk = ckks::deserialize_public_key(read_file(dir / kPublicKeyFile), ctx);
  out.keys.evk = ckks::deserialize_evaluation_key(read_file(dir / kEvalKeyFile), ctx);
  return out;
}

KeyDir load_keys(const fs::path& dir) {
  auto out = load_public_keys(dir);
  const auto& ctx = *out.ctx;
  out.keys.sk = ckks::deserialize_secret_key(read_file(dir / kSecretKeyFile), ctx);
  out.keys.rotations = ckks::deserialize_rotation_keys(read_file(dir / kRotationKeyFile), ctx);
  return out;
}

}  // namespace hefine::io
