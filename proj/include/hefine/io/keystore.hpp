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

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "hefine/ckks/context.hpp"
#include "hefine/ckks/keys.hpp"

namespace hefine::io {

// A key directory holds one CKX1 object per file plus a manifest:
//   sk.ckx   secret key (never leaves the hospital)
//   pk.ckx   public key
//   evk.ckx  relinearization key
//   rot.ckx  rotation key set
//   keys.txt key=value lines: format, version, profile, params_hash (hex),
//            ring_degree, levels, seed, rotation_steps (comma separated)
inline constexpr const char* kSecretKeyFile = "sk.ckx";
inline constexpr const char* kPublicKeyFile = "pk.ckx";
inline constexpr const char* kEvalKeyFile = "evk.ckx";
inline constexpr const char* kRotationKeyFile = "rot.ckx";
inline constexpr const char* kKeyManifestFile = "keys.txt";

/// Parses "key=value" lines; blank lines and '#' comments are skipped.
/// Throws FormatError on a line without '=' or a repeated key.
std::map<std::string, std::string> parse_manifest(const std::string& text);
std::string format_manifest(const std::vector<std::pair<std::string, std::string>>& entries);

void save_keys(const std::filesystem::path& dir, const ckks::Context& ctx, const ckks::KeyBundle& keys,
               std::uint64_t seed);

struct KeyDir {
  ckks::ContextPtr ctx;
  ckks::KeyBundle keys;  // sk left empty by load_public_keys
};

/// Rebuilds the context named by the manifest and loads every key. Throws
/// ParamsMismatch when a file was made under other parameters, IoError or
/// FormatError for missing or damaged files.
KeyDir load_keys(const std::filesystem::path& dir);
/// Same, without the secret key or the rotation keys.
KeyDir load_public_keys(const std::filesystem::path& dir);

}  // namespace hefine::io
