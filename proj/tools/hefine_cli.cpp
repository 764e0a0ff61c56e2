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

// hefine: command-line driver for both sides of an encrypted fine-tuning
// session. The hospital side owns keys, plaintext features and decryption;
// the cloud side (serve) only ever holds public material and ciphertexts.
//
// Exit codes: 0 success, 1 usage, 2 I/O or file format, 3 protocol,
// 4 crypto-parameter mismatch.

#include <csignal>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "hefine/ckks/serialize.hpp"
#include "hefine/common/error.hpp"
#include "hefine/common/prng.hpp"
#include "hefine/io/dataset.hpp"
#include "hefine/io/features.hpp"
#include "hefine/io/keystore.hpp"
#include "hefine/linalg/packing.hpp"
#include "hefine/protocol/hospital.hpp"
#include "hefine/protocol/messages.hpp"
#include "hefine/protocol/server.hpp"
#include "hefine/train/oracle.hpp"
#include "hefine/train/trainer.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace hefine;

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kIo = 2, kProtocol = 3, kParams = 4 };

/// A bad flag combination discovered after parsing.
struct UsageError : Error {
  using Error::Error;
};

// Dataset directory written by encrypt-features.
constexpr const char* kDataManifest = "dataset.txt";
constexpr const char* kStatsFile = "stats.json";
std::string ds_file(std::string_view role) { return std::string(role) + ".ds"; }
std::string split_file(std::string_view role) { return "split_" + std::string(role) + ".efv"; }

Bytes text_bytes(const std::string& s) { return Bytes(s.begin(), s.end()); }
std::string file_text(const fs::path& p) {
  const auto b = io::read_file(p);
  return std::string(b.begin(), b.end());
}
void write_text(const fs::path& p, const std::string& s) { io::write_file(p, text_bytes(s)); }

std::size_t to_size(const std::map<std::string, std::string>& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw FormatError("manifest: missing '" + key + "'");
  try {
    return static_cast<std::size_t>(std::stoull(it->second));
  } catch (const std::exception&) {
    throw FormatError("manifest: '" + key + "' is not a number");
  }
}

struct DataManifest {
  std::size_t dim = 0, classes = 0, batch = 0;
  std::uint64_t params_hash = 0;
};

DataManifest read_data_manifest(const fs::path& dir) {
  const auto m = io::parse_manifest(file_text(dir / kDataManifest));
  if (m.count("format") == 0 || m.at("format") != "hefine-dataset") throw FormatError("dataset manifest: bad format");
  DataManifest d;
  d.dim = to_size(m, "feature_dim");
  d.classes = to_size(m, "classes");
  d.batch = to_size(m, "batch");
  d.params_hash = std::stoull(m.at("params_hash"), nullptr, 16);
  return d;
}

std::string hex64(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

protocol::Connection dial(const std::string& addr) {
  return protocol::Connection::connect(protocol::Address::parse(addr));
}

/// Encrypted test or val chunks, each a single packed matrix.
std::vector<linalg::PackedMatrix> load_chunks(const ckks::Context& ctx, const fs::path& path) {
  return protocol::decode_upload(io::read_file(path), ctx).x;
}

Matrix stack_logits(const ckks::Context& ctx, const std::vector<linalg::PackedMatrix>& chunks,
                    const ckks::SecretKey& sk) {
  Matrix out;
  for (const auto& c : chunks) {
    const auto m = linalg::unpack(ctx, c, sk);
    if (out.cols == 0) out.cols = m.cols;
    if (m.cols != out.cols) throw FormatError("logit chunks disagree on the class count");
    out.data.insert(out.data.end(), m.data.begin(), m.data.end());
    out.rows += m.rows;
  }
  return out;
}

// ---------------------------------------------------------------- commands

int cmd_gen_blobs(std::size_t classes, std::size_t dim, std::size_t rows, std::uint64_t seed, double separation,
                  const fs::path& out) {
  io::save_efv(out, io::gen_blobs(classes, dim, rows, seed, separation));
  std::cout << "wrote " << rows << " rows, " << dim << " features, " << classes << " classes to " << out << "\n";
  return kOk;
}

int cmd_keygen(const std::string& profile, const fs::path& out, std::uint64_t seed, std::size_t features,
               std::size_t batch) {
  const auto ctx = ckks::Context::create(ckks::make_params(ckks::parse_profile(profile)));
  std::vector<long> steps;
  if (features > 0) {
    steps = linalg::plan_packing(batch, features + 1, ctx->slot_count()).rotation_steps;
  } else {
    steps = ckks::power_of_two_steps(ctx->slot_count());
  }
  const auto t0 = std::chrono::steady_clock::now();
  const auto keys = ckks::keygen(*ctx, seed, steps);
  io::save_keys(out, *ctx, keys, seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << "profile " << profile << ", N = " << ctx->degree() << ", " << ctx->max_level() << " levels, "
            << steps.size() << " rotation keys, params " << hex64(ctx->hash()) << "\n"
            << "keys written to " << out << " in " << secs << " s\n";
  return kOk;
}

int cmd_encrypt_features(const fs::path& in, bool from_csv, const fs::path& keys_dir, const fs::path& out,
                         std::size_t batch, std::uint64_t seed) {
  if (batch == 0) throw UsageError("--batch must be positive");
  io::FeatureSet set = from_csv ? io::parse_csv(file_text(in)) : io::load_efv(in);
  if (set.x.rows == 0) throw FormatError(in.string() + ": no rows");
  if (set.x.cols == 0) throw FormatError(in.string() + ": no features");
  const auto kd = io::load_public_keys(keys_dir);
  const auto& ctx = *kd.ctx;

  const auto split = io::stratified_split(set.labels, set.classes, {}, seed);
  if (split.train.empty()) throw FormatError(in.string() + ": too few rows for a training split");
  const io::FeatureSet parts[3] = {io::subset(set, split.train), io::subset(set, split.val), io::subset(set, split.test)};
  const auto stats = io::Standardizer::fit(parts[0].x);
  const std::size_t d = set.x.cols + 1;

  if (fs::exists(out) && !fs::is_empty(out)) throw IoError(out.string() + " exists and is not empty");
  const fs::path tmp = out.string() + ".partial-" + std::to_string(::getpid());
  fs::remove_all(tmp);
  fs::create_directories(tmp);
  try {
    Prng rng(seed, "encrypt-features");
    const char* roles[3] = {"train", "val", "test"};
    for (int p = 0; p < 3; ++p) {
      io::save_efv(tmp / split_file(roles[p]), parts[p]);
      if (parts[p].x.rows == 0) continue;
      const Matrix x = stats.apply(parts[p].x);
      protocol::UploadDataset up;
      up.role = static_cast<protocol::DatasetRole>(p);
      if (p == 0) {
        for (const auto& b : train::make_batches(x, train::one_hot(parts[p].labels, set.classes), batch)) {
          auto eb = train::encrypt_batch(ctx, b.x, b.y, kd.keys.pk, rng);
          up.x.push_back(std::move(eb.x));
          up.y.push_back(std::move(eb.y));
        }
      } else {
        for (std::size_t r = 0; r < x.rows; r += batch) {
          const auto chunk = slice_rows(x, r, std::min(x.rows, r + batch));
          up.x.push_back(linalg::pack(ctx, chunk, linalg::plan_packing(chunk.rows, d, ctx.slot_count()),
                                      kd.keys.pk, rng));
        }
      }
      io::write_file(tmp / ds_file(roles[p]), protocol::encode(ctx, up));
    }
    write_text(tmp / kStatsFile, stats.to_json());
    write_text(tmp / kDataManifest,
               io::format_manifest({{"format", "hefine-dataset"},
                                    {"version", "1"},
                                    {"source", in.filename().string()},
                                    {"raw_dim", std::to_string(set.x.cols)},
                                    {"feature_dim", std::to_string(d)},
                                    {"classes", std::to_string(set.classes)},
                                    {"batch", std::to_string(batch)},
                                    {"split_seed", std::to_string(seed)},
                                    {"train_rows", std::to_string(split.train.size())},
                                    {"val_rows", std::to_string(split.val.size())},
                                    {"test_rows", std::to_string(split.test.size())},
                                    {"params_hash", hex64(ctx.hash())}}));
    if (fs::exists(out)) fs::remove(out);
    fs::rename(tmp, out);
  } catch (...) {
    std::error_code ec;
    fs::remove_all(tmp, ec);
    throw;
  }
  std::cout << "encrypted " << split.train.size() << "/" << split.val.size() << "/" << split.test.size()
            << " train/val/test rows (" << d << " features with bias) into " << out << "\n";
  return kOk;
}

int cmd_serve(const std::string& listen, const std::string& profile, const fs::path& job_dir,
              std::uint64_t max_payload) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  const auto ctx = ckks::Context::create(ckks::make_params(ckks::parse_profile(profile)));
  protocol::ServerConfig cfg;
  cfg.max_payload = max_payload;
  cfg.job_dir = job_dir;
  cfg.log = [](const std::string& line) { std::clog << line << std::endl; };
  if (!job_dir.empty()) fs::create_directories(job_dir);
  protocol::CloudServer server(ctx, protocol::Address::parse(listen), cfg);
  const auto addr = protocol::Address::parse(listen);
  std::cout << "listening on " << addr.host << ":" << server.port() << " (profile " << profile << ", params "
            << hex64(ctx->hash()) << ")" << std::endl;
  server.start();
  int sig = 0;
  sigwait(&set, &sig);
  std::cout << "shutting down" << std::endl;
  server.stop();
  return kOk;
}

struct TrainFlags {
  std::string server;
  fs::path keys, data, out;
  std::optional<std::size_t> epochs, batch;
  std::optional<double> lr;
  std::string preset;
  std::uint64_t job = 1;
  bool resume = false;
  std::uint64_t seed = 0;
};

int cmd_train(const TrainFlags& f) {
  const auto data = read_data_manifest(f.data);
  train::Hyperparams hp;
  hp.batch_size = data.batch;
  if (!f.preset.empty()) train::apply(train::find_preset(f.preset), hp);
  if (f.epochs) hp.epochs = *f.epochs;
  if (f.lr) hp.learning_rate = *f.lr;
  if (f.batch) hp.batch_size = *f.batch;
  hp.feature_dim = data.dim;
  hp.class_count = data.classes;
  hp.seed = f.seed;
  if (hp.batch_size != data.batch) {
    throw UsageError("batch size " + std::to_string(hp.batch_size) + " differs from the " +
                     std::to_string(data.batch) + " rows per batch the data was encrypted with; rerun " +
                     "encrypt-features with --batch " + std::to_string(hp.batch_size));
  }
  train::validate(hp);

  const auto kd = io::load_keys(f.keys);
  const auto& ctx = *kd.ctx;
  if (data.params_hash != ctx.hash()) throw ParamsMismatch("dataset was encrypted under other parameters");
  const auto val_set = io::load_efv(f.data / split_file("val"));

  protocol::HospitalClient client(ctx, kd.keys, dial(f.server), f.seed ^ f.job);
  client.hello();
  client.provision();
  client.upload(io::read_file(f.data / ds_file("train")));
  const bool have_val = fs::exists(f.data / ds_file("val"));
  if (have_val) client.upload(io::read_file(f.data / ds_file("val")));

  json epochs = json::array();
  double enc_seconds = 0;
  std::cout << "epoch  steps  refresh  seconds  val_acc\n";
  const auto final_report = client.train({hp, f.job, f.resume}, [&](const protocol::EpochReport& r) {
    if (r.final()) return;
    json e{{"epoch", r.log.epoch + 1},
           {"steps", r.log.steps},
           {"refresh_rounds", r.log.refresh_rounds},
           {"seconds", r.log.seconds}};
    enc_seconds += r.log.seconds;
    char line[96];
    if (!r.val_logits.empty() && val_set.x.rows > 0) {
      const double acc = train::accuracy(stack_logits(ctx, r.val_logits, kd.keys.sk), val_set.labels);
      e["val_accuracy"] = acc;
      std::snprintf(line, sizeof line, "%5u  %5u  %7u  %7.1f  %.4f\n", r.log.epoch + 1, r.log.steps,
                    r.log.refresh_rounds, r.log.seconds, acc);
    } else {
      std::snprintf(line, sizeof line, "%5u  %5u  %7u  %7.1f  -\n", r.log.epoch + 1, r.log.steps,
                    r.log.refresh_rounds, r.log.seconds);
    }
    std::cout << line << std::flush;
    epochs.push_back(std::move(e));
  });

  fs::create_directories(f.out);
  io::write_file(f.out / "model.pmx", linalg::serialize(ctx, *final_report.weights));
  json metrics{{"format", "hefine-metrics"},
               {"version", 1},
               {"job", f.job},
               {"resumed", f.resume},
               {"epochs", hp.epochs},
               {"learning_rate", hp.learning_rate},
               {"batch_size", hp.batch_size},
               {"feature_dim", hp.feature_dim},
               {"classes", hp.class_count},
               {"seed", hp.seed},
               {"enc_training_seconds", enc_seconds},
               {"refresh_rounds", client.refresh_rounds()},
               {"per_epoch", epochs}};
  write_text(f.out / "metrics.json", metrics.dump(2) + "\n");
  std::ostringstream txt;
  txt << "job=" << f.job << "\nepochs=" << hp.epochs << "\nlearning_rate=" << hp.learning_rate
      << "\nbatch_size=" << hp.batch_size << "\nenc_training_seconds=" << enc_seconds
      << "\nrefresh_rounds=" << client.refresh_rounds() << "\n";
  for (const auto& e : epochs) {
    txt << "epoch." << e["epoch"].get<int>() << "=steps:" << e["steps"].get<int>()
        << " seconds:" << e["seconds"].get<double>();
    if (e.contains("val_accuracy")) txt << " val_accuracy:" << e["val_accuracy"].get<double>();
    txt << "\n";
  }
  write_text(f.out / "metrics.txt", txt.str());
  std::cout << "model and metrics written to " << f.out << "\n";
  return kOk;
}

int cmd_infer(const std::string& server, const fs::path& keys_dir, const fs::path& data_dir, std::uint64_t job,
              const std::string& role, const fs::path& out) {
  const auto kd = io::load_keys(keys_dir);
  const auto& ctx = *kd.ctx;
  const auto chunks = load_chunks(ctx, data_dir / ds_file(role));
  protocol::HospitalClient client(ctx, kd.keys, dial(server), job);
  client.hello();
  client.provision();
  protocol::UploadDataset logits;
  logits.role = protocol::DatasetRole::kTest;
  for (const auto& c : chunks) logits.x.push_back(client.infer(job, c));
  io::write_file(out, protocol::encode(ctx, logits));
  std::cout << "encrypted logits for " << chunks.size() << " chunk(s) written to " << out << "\n";
  return kOk;
}

int cmd_decrypt_logits(const fs::path& keys_dir, const fs::path& in, const fs::path& labels_file,
                       const fs::path& out) {
  const auto kd = io::load_keys(keys_dir);
  const auto logits = stack_logits(*kd.ctx, load_chunks(*kd.ctx, in), kd.keys.sk);
  const auto pred = train::argmax_rows(logits);
  std::optional<io::FeatureSet> labels;
  if (!labels_file.empty()) {
    labels = io::load_efv(labels_file);
    if (labels->labels.size() != logits.rows) {
      throw FormatError("label file has " + std::to_string(labels->labels.size()) + " rows, logits have " +
                        std::to_string(logits.rows));
    }
  }
  if (!out.empty()) {
    std::ostringstream csv;
    csv << "row,prediction" << (labels ? ",label" : "");
    for (std::size_t j = 0; j < logits.cols; ++j) csv << ",logit" << j;
    csv << "\n";
    for (std::size_t i = 0; i < logits.rows; ++i) {
      csv << i << "," << pred[i];
      if (labels) csv << "," << labels->labels[i];
      for (std::size_t j = 0; j < logits.cols; ++j) csv << "," << logits(i, j);
      csv << "\n";
    }
    write_text(out, csv.str());
  }
  std::cout << "rows=" << logits.rows << "\n";
  if (labels) std::cout << "accuracy=" << train::accuracy(logits, labels->labels) << "\n";
  return kOk;
}

int cmd_report(const fs::path& keys_dir, const fs::path& data_dir, const fs::path& run_dir,
               const fs::path& logits_file, const std::string& name, const fs::path& out) {
  const auto kd = io::load_keys(keys_dir);
  const auto metrics = json::parse(file_text(run_dir / "metrics.json"), nullptr, false);
  if (metrics.is_discarded() || metrics.value("format", "") != "hefine-metrics") {
    throw FormatError((run_dir / "metrics.json").string() + ": not a metrics file");
  }
  const auto stats = io::Standardizer::from_json(file_text(data_dir / kStatsFile));
  const auto train_set = io::load_efv(data_dir / split_file("train"));
  const auto test_set = io::load_efv(data_dir / split_file("test"));

  const auto enc_logits = stack_logits(*kd.ctx, load_chunks(*kd.ctx, logits_file), kd.keys.sk);
  if (enc_logits.rows != test_set.x.rows) throw FormatError("logits and test split differ in row count");
  const double enc_acc = train::accuracy(enc_logits, test_set.labels);

  train::Hyperparams hp;
  hp.epochs = metrics.at("epochs").get<std::size_t>();
  hp.learning_rate = metrics.at("learning_rate").get<double>();
  hp.batch_size = metrics.at("batch_size").get<std::size_t>();
  hp.feature_dim = metrics.at("feature_dim").get<std::size_t>();
  hp.class_count = metrics.at("classes").get<std::size_t>();
  const auto t0 = std::chrono::steady_clock::now();
  const auto batches = train::make_batches(stats.apply(train_set.x),
                                           train::one_hot(train_set.labels, train_set.classes), hp.batch_size);
  const auto plain = train::plaintext_train(batches, hp, nullptr);
  const double plain_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double plain_acc = train::accuracy(multiply(stats.apply(test_set.x), plain.state.w), test_set.labels);
  const double enc_secs = metrics.at("enc_training_seconds").get<double>();

  char table[512];
  std::snprintf(table, sizeof table,
                "%-14s %-16s %-14s %-22s %-20s\n%-14s %-16.2f %-14.2f %-22.4f %-20.4f\n", "Dataset",
                "Unenc accuracy", "Enc Accuracy", "Unenc training time", "Enc training time", name.c_str(),
                100 * plain_acc, 100 * enc_acc, plain_secs / 60, enc_secs / 60);
  std::string text = table;
  text += "(accuracies in %, times in minutes; " + std::to_string(test_set.x.rows) + " test rows, " +
          std::to_string(hp.epochs) + " epochs)\n";
  std::cout << text;
  if (!out.empty()) {
    write_text(out, text);
    json j{{"format", "hefine-report"},
           {"version", 1},
           {"dataset", name},
           {"unenc_accuracy", plain_acc},
           {"enc_accuracy", enc_acc},
           {"unenc_training_seconds", plain_secs},
           {"enc_training_seconds", enc_secs},
           {"test_rows", test_set.x.rows}};
    write_text(fs::path(out.string() + ".json"), j.dump(2) + "\n");
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hefine: fine-tune a softmax classifier on encrypted features"};
  app.require_subcommand(1);

  std::size_t classes = 3, dim = 16, rows = 600, features = 0, batch = 512;
  std::uint64_t seed = 0, job = 1, max_payload = protocol::kDefaultMaxPayload;
  double separation = 6.0;
  fs::path out, in, keys, data, run, labels, job_dir;
  std::string profile = "test", listen = "127.0.0.1:7700", role = "test", name = "dataset";
  TrainFlags tf;

  auto* blobs = app.add_subcommand("gen-blobs", "Write a synthetic Gaussian-mixture EFV1 file");
  blobs->add_option("--classes", classes)->check(CLI::Range(2, 65535));
  blobs->add_option("--dim", dim)->check(CLI::PositiveNumber);
  blobs->add_option("--rows", rows)->check(CLI::PositiveNumber);
  blobs->add_option("--seed", seed);
  blobs->add_option("--separation", separation, "centroid distance in standard deviations");
  blobs->add_option("--out", out)->required();

  auto* kg = app.add_subcommand("keygen", "Generate a key directory");
  kg->add_option("--profile", profile)->check(CLI::IsMember({"test", "secure128"}));
  kg->add_option("--out", out)->required();
  kg->add_option("--seed", seed)->required();
  kg->add_option("--features", features, "raw feature count; limits rotation keys to what training needs");
  kg->add_option("--batch", batch, "rows per batch, used with --features")->check(CLI::PositiveNumber);

  auto* enc = app.add_subcommand("encrypt-features", "Split, standardise and encrypt a feature file");
  auto* in_opt = enc->add_option("--in", in, "EFV1 feature file");
  auto* csv_opt = enc->add_option("--from-csv", in, "CSV feature file (features, then integer label)");
  in_opt->excludes(csv_opt);
  enc->add_option("--keys", keys)->required()->check(CLI::ExistingDirectory);
  enc->add_option("--out", out)->required();
  enc->add_option("--batch", batch)->check(CLI::PositiveNumber);
  enc->add_option("--seed", seed, "split and encryption seed");

  auto* srv = app.add_subcommand("serve", "Run the cloud server until SIGINT or SIGTERM");
  srv->add_option("--listen", listen, "host:port, port 0 picks a free one");
  srv->add_option("--profile", profile)->check(CLI::IsMember({"test", "secure128"}));
  srv->add_option("--job-dir", job_dir, "checkpoint directory for resumable jobs");
  srv->add_option("--max-payload", max_payload);

  auto* tr = app.add_subcommand("train", "Train on the cloud, answering refresh requests locally");
  tr->add_option("--server", tf.server)->required();
  tr->add_option("--keys", tf.keys)->required()->check(CLI::ExistingDirectory);
  tr->add_option("--data", tf.data)->required()->check(CLI::ExistingDirectory);
  tr->add_option("--epochs", tf.epochs);
  tr->add_option("--lr", tf.lr);
  tr->add_option("--batch", tf.batch);
  std::vector<std::string> preset_names;
  for (const auto& p : train::presets()) preset_names.emplace_back(p.name);
  tr->add_option("--preset", tf.preset)->check(CLI::IsMember(preset_names));
  tr->add_option("--job", tf.job);
  tr->add_flag("--resume", tf.resume, "continue the job from the server's checkpoint");
  tr->add_option("--seed", tf.seed);
  tr->add_option("--out", tf.out)->required();

  auto* inf = app.add_subcommand("infer", "Run encrypted inference with a trained job");
  inf->add_option("--server", listen)->required();
  inf->add_option("--keys", keys)->required()->check(CLI::ExistingDirectory);
  inf->add_option("--data", data)->required()->check(CLI::ExistingDirectory);
  inf->add_option("--job", job);
  inf->add_option("--role", role)->check(CLI::IsMember({"val", "test"}));
  inf->add_option("--out", out)->required();

  auto* dec = app.add_subcommand("decrypt-logits", "Decrypt logits, print accuracy");
  dec->add_option("--keys", keys)->required()->check(CLI::ExistingDirectory);
  dec->add_option("--in", in)->required();
  dec->add_option("--labels", labels, "EFV1 file holding the matching labels");
  dec->add_option("--out", out, "CSV of predictions and logits");

  auto* rep = app.add_subcommand("report", "Compare encrypted and plaintext training");
  rep->add_option("--keys", keys)->required()->check(CLI::ExistingDirectory);
  rep->add_option("--data", data)->required()->check(CLI::ExistingDirectory);
  rep->add_option("--run", run, "train --out directory")->required()->check(CLI::ExistingDirectory);
  rep->add_option("--logits", in)->required();
  rep->add_option("--name", name);
  rep->add_option("--out", out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*blobs) return cmd_gen_blobs(classes, dim, rows, seed, separation, out);
    if (*kg) return cmd_keygen(profile, out, seed, features, batch);
    if (*enc) {
      if (in.empty()) throw UsageError("one of --in or --from-csv is required");
      return cmd_encrypt_features(in, csv_opt->count() > 0, keys, out, batch, seed);
    }
    if (*srv) return cmd_serve(listen, profile, job_dir, max_payload);
    if (*tr) return cmd_train(tf);
    if (*inf) return cmd_infer(listen, keys, data, job, role, out);
    if (*dec) return cmd_decrypt_logits(keys, in, labels, out);
    if (*rep) return cmd_report(keys, data, run, in, name, out);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const ParamsMismatch& e) {
    std::cerr << "parameter mismatch: " << e.what() << "\n";
    return kParams;
  } catch (const ProtocolError& e) {
    std::cerr << "protocol error: " << e.what() << "\n";
    return e.code() == static_cast<int>(protocol::ErrorCode::kParamsMismatch) ? kParams : kProtocol;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kIo;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }
  return kUsage;
}
