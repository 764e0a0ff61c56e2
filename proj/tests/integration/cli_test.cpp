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

#include <gtest/gtest.h>

#include <csignal>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "hefine/ckks/serialize.hpp"
#include "hefine/io/dataset.hpp"
#include "hefine/io/features.hpp"
#include "hefine/io/keystore.hpp"
#include "hefine/linalg/packing.hpp"
#include "hefine/protocol/messages.hpp"
#include "hefine/train/oracle.hpp"

extern char** environ;

namespace hefine {
namespace {

namespace fs = std::filesystem;

struct Result {
  int rc = -1;
  std::string out;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

/// Runs the CLI with `args`, capturing stdout and stderr together.
Result cli(const std::vector<std::string>& args, const fs::path& cwd) {
  std::string cmd = "cd " + quote(cwd.string()) + " && " + quote(HEFINE_CLI);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " 2>&1";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

/// `hefine serve` in a child process on an ephemeral port.
class ServerProcess {
 public:
  ServerProcess(const fs::path& cwd, const std::string& profile) {
    int fds[2];
    if (::pipe(fds) != 0) throw std::runtime_error("pipe");
    posix_spawn_file_actions_t fa;
    posix_spawn_file_actions_init(&fa);
    posix_spawn_file_actions_adddup2(&fa, fds[1], STDOUT_FILENO);
    posix_spawn_file_actions_addclose(&fa, fds[0]);
    const std::string jobs = (cwd / "jobs").string();
    std::vector<std::string> args = {HEFINE_CLI, "serve", "--listen", "127.0.0.1:0", "--profile", profile,
                                     "--job-dir", jobs};
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    argv.push_back(nullptr);
    if (posix_spawn(&pid_, HEFINE_CLI, &fa, nullptr, argv.data(), environ) != 0) throw std::runtime_error("spawn");
    posix_spawn_file_actions_destroy(&fa);
    ::close(fds[1]);
    out_ = ::fdopen(fds[0], "r");
    char line[256] = {};
    if (!std::fgets(line, sizeof line, out_)) throw std::runtime_error("server printed nothing");
    const std::string s(line);
    const auto colon = s.find("127.0.0.1:");
    if (colon == std::string::npos) throw std::runtime_error("unexpected server banner: " + s);
    port_ = std::stoi(s.substr(colon + 10));
  }
  ~ServerProcess() {
    if (pid_ > 0) stop();
    if (out_) std::fclose(out_);
  }
  std::string address() const { return "127.0.0.1:" + std::to_string(port_); }
  /// SIGTERM, then the exit status.
  int stop() {
    ::kill(pid_, SIGTERM);
    int status = 0;
    ::waitpid(pid_, &status, 0);
    pid_ = -1;
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

 private:
  pid_t pid_ = -1;
  FILE* out_ = nullptr;
  int port_ = 0;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("hefine_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    ASSERT_EQ(cli({"gen-blobs", "--classes", "3", "--dim", "8", "--rows", "150", "--seed", "4", "--out", "blobs.efv"},
                  dir_).rc, 0);
    const auto k = cli({"keygen", "--profile", "test", "--out", "keys", "--seed", "11", "--features", "8", "--batch",
                        "64"}, dir_);
    ASSERT_EQ(k.rc, 0) << k.out;
    const auto e = cli({"encrypt-features", "--in", "blobs.efv", "--keys", "keys", "--out", "data", "--batch", "64",
                        "--seed", "2"}, dir_);
    ASSERT_EQ(e.rc, 0) << e.out;
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static inline fs::path dir_;
};

TEST_F(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(cli({}, dir_).rc, 1);
  EXPECT_EQ(cli({"frobnicate"}, dir_).rc, 1);
  EXPECT_EQ(cli({"gen-blobs", "--rows", "10"}, dir_).rc, 1);  // --out missing
  EXPECT_EQ(cli({"keygen", "--profile", "insecure", "--out", "k", "--seed", "1"}, dir_).rc, 1);
  EXPECT_EQ(cli({"train", "--server", "x:1", "--keys", "keys", "--data", "data", "--preset", "cifar", "--out", "r"},
                dir_).rc, 1);
  EXPECT_EQ(cli({"encrypt-features", "--keys", "keys", "--out", "nowhere"}, dir_).rc, 1);
  EXPECT_EQ(cli({"--help"}, dir_).rc, 0);
}

TEST_F(Cli, PresetExpandsToItsTrainingSettings) {
  // The data was encrypted with 64-row batches, so the preset's 512 is refused
  // before any connection is attempted; the message names the preset's batch.
  const auto r = cli({"train", "--server", "127.0.0.1:1", "--keys", "keys", "--data", "data", "--preset", "dermamnist",
                      "--out", "run"}, dir_);
  EXPECT_EQ(r.rc, 1);
  EXPECT_NE(r.out.find("batch size 512"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "run"));
}

TEST_F(Cli, GenBlobsIsDeterministicAndBalanced) {
  ASSERT_EQ(cli({"gen-blobs", "--classes", "4", "--dim", "5", "--rows", "103", "--seed", "8", "--out", "a.efv"}, dir_).rc, 0);
  ASSERT_EQ(cli({"gen-blobs", "--classes", "4", "--dim", "5", "--rows", "103", "--seed", "8", "--out", "b.efv"}, dir_).rc, 0);
  ASSERT_EQ(cli({"gen-blobs", "--classes", "4", "--dim", "5", "--rows", "103", "--seed", "9", "--out", "c.efv"}, dir_).rc, 0);
  EXPECT_EQ(slurp(dir_ / "a.efv"), slurp(dir_ / "b.efv"));
  EXPECT_NE(slurp(dir_ / "a.efv"), slurp(dir_ / "c.efv"));
  const auto set = io::load_efv(dir_ / "a.efv");
  EXPECT_EQ(set.x.rows, 103u);
  EXPECT_EQ(set.x.cols, 5u);
  std::vector<int> hist(4);
  for (auto l : set.labels) ++hist[l];
  EXPECT_LE(*std::max_element(hist.begin(), hist.end()) - *std::min_element(hist.begin(), hist.end()), 1);
}

TEST_F(Cli, KeygenWritesDocumentedFilesDeterministically) {
  for (const char* f : {"sk.ckx", "pk.ckx", "evk.ckx", "rot.ckx", "keys.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "keys" / f)) << f;
  }
  const auto m = io::parse_manifest(slurp(dir_ / "keys" / "keys.txt"));
  EXPECT_EQ(m.at("profile"), "test");
  EXPECT_EQ(m.at("ring_degree"), "8192");
  EXPECT_EQ(m.at("seed"), "11");
  EXPECT_FALSE(m.at("rotation_steps").empty());

  ASSERT_EQ(cli({"keygen", "--out", "keys2", "--seed", "11", "--features", "8", "--batch", "64"}, dir_).rc, 0);
  for (const char* f : {"sk.ckx", "pk.ckx", "evk.ckx", "rot.ckx", "keys.txt"}) {
    EXPECT_TRUE(slurp(dir_ / "keys" / f) == slurp(dir_ / "keys2" / f)) << f;
  }
  ASSERT_EQ(cli({"keygen", "--out", "keys3", "--seed", "12", "--features", "1", "--batch", "1"}, dir_).rc, 0);
  EXPECT_NE(slurp(dir_ / "keys" / "pk.ckx"), slurp(dir_ / "keys3" / "pk.ckx"));
  fs::remove_all(dir_ / "keys2");
  fs::remove_all(dir_ / "keys3");
}

TEST_F(Cli, EncryptedFeaturesDecryptToStandardisedRows) {
  const auto kd = io::load_keys(dir_ / "keys");
  const auto& ctx = *kd.ctx;
  const auto stats = io::Standardizer::from_json(slurp(dir_ / "data" / "stats.json"));
  const auto train_set = io::load_efv(dir_ / "data" / "split_train.efv");
  const auto test_set = io::load_efv(dir_ / "data" / "split_test.efv");
  const auto m = io::parse_manifest(slurp(dir_ / "data" / "dataset.txt"));
  EXPECT_EQ(std::stoul(m.at("train_rows")), train_set.x.rows);
  EXPECT_EQ(std::stoul(m.at("train_rows")) + std::stoul(m.at("val_rows")) + std::stoul(m.at("test_rows")), 150u);
  EXPECT_EQ(m.at("feature_dim"), "9");

  // Train: batches in order, features standardised with the sidecar, one-hot labels.
  const auto x = stats.apply(train_set.x);
  const auto batches = train::make_batches(x, train::one_hot(train_set.labels, 3), 64);
  const auto up = protocol::decode_upload(io::read_file(dir_ / "data" / "train.ds"), ctx);
  ASSERT_EQ(up.x.size(), batches.size());
  for (std::size_t b = 0; b < batches.size(); ++b) {
    EXPECT_LT(max_abs_diff(linalg::unpack(ctx, up.x[b], kd.keys.sk), batches[b].x), 1e-5);
    EXPECT_LT(max_abs_diff(linalg::unpack(ctx, up.y[b], kd.keys.sk), batches[b].y), 1e-5);
  }
  // Test: the sidecar alone reproduces the encrypted rows.
  const auto tx = stats.apply(test_set.x);
  const auto tup = protocol::decode_upload(io::read_file(dir_ / "data" / "test.ds"), ctx);
  ASSERT_EQ(tup.x.size(), 1u);
  EXPECT_TRUE(tup.y.empty());
  EXPECT_LT(max_abs_diff(linalg::unpack(ctx, tup.x[0], kd.keys.sk), tx), 1e-5);
  for (std::size_t i = 0; i < tx.rows; ++i) EXPECT_EQ(tx(i, tx.cols - 1), 1.0);
}

TEST_F(Cli, EncryptFeaturesFailuresLeaveNoOutput) {
  io::FeatureSet empty;
  empty.x = Matrix(0, 4);
  empty.classes = 2;
  io::save_efv(dir_ / "empty.efv", empty);
  const auto r = cli({"encrypt-features", "--in", "empty.efv", "--keys", "keys", "--out", "empty_out"}, dir_);
  EXPECT_EQ(r.rc, 2) << r.out;
  EXPECT_FALSE(fs::exists(dir_ / "empty_out"));

  std::ofstream(dir_ / "bad.csv") << "1.0,2.0,0\n1.0,x,1\n";
  EXPECT_EQ(cli({"encrypt-features", "--from-csv", "bad.csv", "--keys", "keys", "--out", "csv_out"}, dir_).rc, 2);
  EXPECT_FALSE(fs::exists(dir_ / "csv_out"));

  EXPECT_EQ(cli({"encrypt-features", "--in", "missing.efv", "--keys", "keys", "--out", "m_out"}, dir_).rc, 2);
  EXPECT_EQ(cli({"encrypt-features", "--in", "blobs.efv", "--keys", "keys", "--out", "data"}, dir_).rc, 2);

  // Keys whose manifest names other parameters.
  fs::create_directories(dir_ / "badkeys");
  auto text = slurp(dir_ / "keys" / "keys.txt");
  text.replace(text.find("params_hash=0x") + 14, 4, "dead");
  std::ofstream(dir_ / "badkeys" / "keys.txt") << text;
  fs::copy_file(dir_ / "keys" / "pk.ckx", dir_ / "badkeys" / "pk.ckx");
  EXPECT_EQ(cli({"encrypt-features", "--in", "blobs.efv", "--keys", "badkeys", "--out", "b_out"}, dir_).rc, 4);
  EXPECT_FALSE(fs::exists(dir_ / "b_out"));
}

TEST_F(Cli, CsvImportMatchesEfv) {
  std::ofstream csv(dir_ / "tiny.csv");
  csv << "# two features then the label\n";
  Prng rng(5);
  for (int i = 0; i < 40; ++i) csv << rng.normal() + 3 * (i % 2) << "," << rng.normal() << "," << (i % 2) << "\n";
  csv.close();
  const auto r = cli({"encrypt-features", "--from-csv", "tiny.csv", "--keys", "keys", "--out", "csv_data",
                      "--batch", "16"}, dir_);
  EXPECT_EQ(r.rc, 0) << r.out;
  const auto set = io::load_efv(dir_ / "csv_data" / "split_train.efv");
  EXPECT_EQ(set.x.cols, 2u);
  EXPECT_EQ(set.classes, 2u);
  EXPECT_EQ(set.x.rows, 28u);
}

TEST_F(Cli, LoopbackSessionTrainsInfersAndReports) {
  ServerProcess server(dir_, "test");
  const auto t = cli({"train", "--server", server.address(), "--keys", "keys", "--data", "data", "--epochs", "1",
                      "--lr", "0.1", "--batch", "64", "--job", "5", "--out", "run"}, dir_);
  ASSERT_EQ(t.rc, 0) << t.out;
  for (const char* f : {"model.pmx", "metrics.txt", "metrics.json"}) EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  EXPECT_NE(slurp(dir_ / "run" / "metrics.txt").find("epoch.1="), std::string::npos);

  const auto i = cli({"infer", "--server", server.address(), "--keys", "keys", "--data", "data", "--job", "5",
                      "--out", "logits.ds"}, dir_);
  ASSERT_EQ(i.rc, 0) << i.out;
  const auto d = cli({"decrypt-logits", "--keys", "keys", "--in", "logits.ds", "--labels", "data/split_test.efv",
                      "--out", "pred.csv"}, dir_);
  ASSERT_EQ(d.rc, 0) << d.out;

  // The printed accuracy equals an independent recount over the CSV logits.
  const auto test_set = io::load_efv(dir_ / "data" / "split_test.efv");
  std::istringstream csv(slurp(dir_ / "pred.csv"));
  std::string line;
  std::getline(csv, line);
  Matrix logits(test_set.x.rows, 3);
  std::size_t hits = 0, row = 0;
  while (std::getline(csv, line)) {
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(std::stod(cell));
    ASSERT_EQ(f.size(), 6u);
    for (int j = 0; j < 3; ++j) logits(row, j) = f[3 + j];
    const auto best = std::max_element(f.begin() + 3, f.end()) - (f.begin() + 3);
    EXPECT_EQ(best, static_cast<long>(f[1]));
    hits += static_cast<std::size_t>(f[1]) == test_set.labels[row];
    ++row;
  }
  ASSERT_EQ(row, test_set.x.rows);
  const double acc = static_cast<double>(hits) / row;
  EXPECT_EQ(acc, train::accuracy(logits, test_set.labels));
  char want[64];
  std::snprintf(want, sizeof want, "accuracy=%g", acc);
  EXPECT_NE(d.out.find(want), std::string::npos) << d.out;
  EXPECT_GT(acc, 0.9);

  const auto rep = cli({"report", "--keys", "keys", "--data", "data", "--run", "run", "--logits", "logits.ds",
                        "--name", "blobs", "--out", "report.txt"}, dir_);
  ASSERT_EQ(rep.rc, 0) << rep.out;
  for (const char* col : {"Unenc accuracy", "Enc Accuracy", "Unenc training time", "Enc training time"}) {
    EXPECT_NE(rep.out.find(col), std::string::npos) << col;
  }
  EXPECT_TRUE(fs::exists(dir_ / "report.txt.json"));

  // A job the server never trained.
  EXPECT_EQ(cli({"infer", "--server", server.address(), "--keys", "keys", "--data", "data", "--job", "99", "--out",
                 "x.ds"}, dir_).rc, 3);
  EXPECT_EQ(server.stop(), 0);
}

TEST_F(Cli, ConnectionFailuresAndParameterMismatch) {
  const auto r = cli({"train", "--server", "127.0.0.1:1", "--keys", "keys", "--data", "data", "--epochs", "1",
                      "--out", "run_refused"}, dir_);
  EXPECT_EQ(r.rc, 3);
  EXPECT_NE(r.out.find("refused"), std::string::npos) << r.out;

  ServerProcess other(dir_, "secure128");
  const auto m = cli({"train", "--server", other.address(), "--keys", "keys", "--data", "data", "--epochs", "1",
                      "--out", "run_mismatch"}, dir_);
  EXPECT_EQ(m.rc, 4) << m.out;
}

}  // namespace
}  // namespace hefine
