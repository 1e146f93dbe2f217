// tests/acceptance/acceptance.cc

// Copyright 2026  The selffilm Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Acceptance run: one PASS/FAIL line per criterion. Trains the tiny
// configuration end to end in a scratch directory (about 11 minutes on one
// core). Exits 0 once every check has run; --strict also turns a FAIL into
// exit status 1.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "selffilm/autograd/variable.h"
#include "selffilm/base/common.h"
#include "selffilm/cli/commands.h"
#include "selffilm/cli/run-config.h"
#include "selffilm/film/film.h"
#include "selffilm/trainers/gan-trainer.h"

namespace selffilm {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Tolerances and budgets.
constexpr double kOperatorBudgetSeconds = 120.0;
constexpr double kLinearityTolerance = 1e-9;
constexpr double kSmokeSupDecrease = 0.5;
constexpr double kSmokeLsdGain = 0.2;
constexpr double kSmokeBudgetSeconds = 900.0;
constexpr double kCycleDecrease = 0.5;
constexpr double kSilhouetteGap = 0.2;
constexpr int kSeeds = 3;
constexpr int kDeterminismEpochs = 2;

struct Outcome {
  std::string criterion;
  bool pass = false;
  std::string detail;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v, int precision = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  return os.str();
}

void Progress(const std::string &msg) { std::cerr << "[acceptance] " << msg << std::endl; }

struct DoctestRun {
  int exit_status = -1;
  int cases = 0, passed = 0, failed = 0;
  double seconds = 0;
};

// Runs a doctest binary and reads its summary line.
DoctestRun RunDoctest(const std::string &binary, const std::string &filter = "") {
  std::string cmd = "'" + binary + "'";
  if (!filter.empty()) cmd += " '--test-case=" + filter + "'";
  cmd += " 2>&1";
  DoctestRun r;
  const auto start = Clock::now();
  FILE *pipe = popen(cmd.c_str(), "r");
  Require<Error>(pipe != nullptr, "cannot run ", binary);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  r.seconds = Seconds(start);
  r.exit_status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::smatch m;
  static const std::regex summary(
      R"(test cases:\s*(\d+)\s*\|\s*(\d+) passed\s*\|\s*(\d+) failed)");
  if (std::regex_search(out, m, summary)) {
    r.cases = std::stoi(m[1]);
    r.passed = std::stoi(m[2]);
    r.failed = std::stoi(m[3]);
  }
  if (r.exit_status != 0) std::cerr << out;
  return r;
}

std::vector<nlohmann::json> ReadLog(const std::string &path) {
  std::ifstream in(path);
  Require<MissingArtifact>(in.good(), "missing training log ", path);
  std::vector<nlohmann::json> records;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) records.push_back(nlohmann::json::parse(line));
  Require(records.size() >= 2, path, ": expected at least two epochs");
  return records;
}

std::string ReadBytes(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

Tensor Probe(int64_t length, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  Tensor t({1, length});
  for (int64_t i = 0; i < length; ++i) t[i] = std::clamp(n(rng), -1.0, 1.0);
  return t;
}

double MaxAbsDiff(const Tensor &a, const Tensor &b) {
  Require(a.Dims() == b.Dims(), "shape mismatch");
  double m = 0;
  for (int64_t i = 0; i < a.Size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

class Acceptance {
 public:
  Acceptance(std::string config, std::string unit_dir, fs::path work)
      : config_(std::move(config)), unit_dir_(std::move(unit_dir)), work_(std::move(work)) {}

  std::vector<Outcome> Run() {
    // The commands print their reports; keep stdout for the verdict lines.
    std::ostringstream sink;
    std::streambuf *saved = std::cout.rdbuf(sink.rdbuf());
    struct Restore {
      std::streambuf *buf;
      ~Restore() { std::cout.rdbuf(buf); }
    } restore{saved};
    OperatorCorrectness();
    Fixtures();
    Pipeline();
    Determinism();
    return outcomes_;
  }

 private:
  RunConfig Config(std::vector<std::string> overrides, const fs::path &run_dir) const {
    overrides.push_back("paths.data_dir=" + (work_ / "data").string());
    overrides.push_back("paths.run_dir=" + run_dir.string());
    return LoadRunConfig(config_, overrides);
  }

  std::string Unit(const std::string &name) const { return (fs::path(unit_dir_) / name).string(); }

  void Record(std::string criterion, bool pass, std::string detail) {
    Progress((pass ? "PASS " : "FAIL ") + criterion + ": " + detail);
    outcomes_.push_back({std::move(criterion), pass, std::move(detail)});
  }

  void OperatorCorrectness() {
    bool ok = true;
    double seconds = 0;
    int cases = 0;
    for (const char *name : {"autograd_test", "pooling_test", "film_test", "losses_test",
                             "scoring_test", "networks_test"}) {
      const DoctestRun r = RunDoctest(Unit(name));
      seconds += r.seconds;
      cases += r.cases;
      ok = ok && r.exit_status == 0 && r.failed == 0 && r.cases > 0;
    }
    Record("operator correctness", ok && seconds < kOperatorBudgetSeconds,
           StrCat(cases, " unit cases incl. gradient checks, ", Fmt(seconds, 1), " s (budget ",
                  kOperatorBudgetSeconds, " s)"));
  }

  void Fixtures() {
    struct Group {
      const char *binary, *filter;
      int expected;
    };
    const Group groups[] = {
        {"pooling_test", "LDE two-frame fixture,ScaleAtt three-frame fixture", 2},
        {"losses_test", "cycle loss examples,identity loss examples", 2},
        {"scoring_test",
         "EER examples,minDCF examples,EER agrees with the brute-force sweep on random trials",
         3}};
    bool ok = true;
    int passed = 0, expected = 0;
    for (const Group &g : groups) {
      const DoctestRun r = RunDoctest(Unit(g.binary), g.filter);
      ok = ok && r.exit_status == 0 && r.passed == g.expected && r.failed == 0;
      passed += r.passed;
      expected += g.expected;
    }
    Record("fixtures", ok,
           StrCat(passed, "/", expected,
                  " fixture cases (LDE, ScaleAtt, cycle/identity gains, EER/minDCF)"));
  }

  static std::string RunName(int seed, bool film) {
    return StrCat("cgan-s", seed, film ? "-film" : "-nofilm");
  }

  void Pipeline() {
    const fs::path runs = work_ / "runs";
    const RunConfig base = Config({}, runs);
    CommandOptions opts;
    Progress("generating corpus and training the speaker embedder");
    CmdGenData(base, opts);
    CmdTrainSpeaker(base, opts);

    struct Run {
      int seed;
      bool film;
      double seconds;
      nlohmann::json eval;
    };
    std::vector<Run> cgan_runs;
    for (int seed = 1; seed <= kSeeds; ++seed) {
      for (bool film : {true, false}) {
        const std::string name = RunName(seed, film);
        Progress("training " + name);
        const RunConfig c = Config({StrCat("cgan.seed=", seed),
                                    StrCat("cgan.use_film=", film ? "true" : "false"),
                                    "cgan.name=" + name},
                                   runs);
        const auto start = Clock::now();
        CmdTrainCgan(c, opts);
        const double seconds = Seconds(start);
        CommandOptions eval_opts;
        eval_opts.checkpoint = name;
        cgan_runs.push_back({seed, film, seconds, CmdEval(c, eval_opts)});
      }
    }

    // Training smoke on the first seed.
    {
      const Run &r = cgan_runs.front();
      const auto log = ReadLog((runs / (RunName(1, true) + ".log.jsonl")).string());
      const double sup0 = log.front().at("valid_sup_loss");
      const double sup1 = log.back().at("valid_sup_loss");
      const double lsd = log.back().at("valid_lsd_4_8");
      const double input = log.back().at("valid_input_lsd_4_8");
      const double decrease = 1.0 - sup1 / sup0;
      const double gain = 1.0 - lsd / input;
      Record("training smoke",
             decrease >= kSmokeSupDecrease && gain >= kSmokeLsdGain &&
                 r.seconds < kSmokeBudgetSeconds,
             StrCat("valid sup_loss ", Fmt(sup0), " -> ", Fmt(sup1), " (-", Fmt(100 * decrease, 1),
                    "%, need ", 100 * kSmokeSupDecrease, "%); LSD 4-8 ", Fmt(lsd, 2), " vs input ",
                    Fmt(input, 2), " dB (-", Fmt(100 * gain, 1), "%, need ", 100 * kSmokeLsdGain,
                    "%); ", Fmt(r.seconds, 0), " s"));
    }

    // Self-FiLM against no-FiLM over seeds.
    {
      double lsd_film = 0, lsd_plain = 0, eer_film = 0, eer_plain = 0, eer_nb = 0;
      for (const Run &r : cgan_runs) {
        const double lsd = r.eval.at("bwe").at("lsd_4_8");
        const double eer = r.eval.at("bwe").at("eer");
        (r.film ? lsd_film : lsd_plain) += lsd / kSeeds;
        (r.film ? eer_film : eer_plain) += eer / kSeeds;
        if (r.film) eer_nb += r.eval.at("no_bwe").at("eer").get<double>() / kSeeds;
      }
      Record("Self-FiLM direction", lsd_film <= lsd_plain && eer_film < eer_nb,
             StrCat("mean LSD 4-8 Self-FiLM ", Fmt(lsd_film), " vs no-FiLM ", Fmt(lsd_plain),
                    " dB; mean EER extended ", Fmt(eer_film), " vs narrowband ", Fmt(eer_nb),
                    " (no-FiLM extended ", Fmt(eer_plain), "), ", kSeeds, " seeds"));
    }

    // Unpaired training.
    {
      Progress("training cyclegan");
      const RunConfig c = Config({"cyclegan.name=cyclegan"}, runs);
      CmdTrainCyclegan(c, opts);
      const auto log = ReadLog((runs / "cyclegan.log.jsonl").string());
      const double cyc0 = log.front().at("valid_cycle_loss");
      const double cyc1 = log.back().at("valid_cycle_loss");
      const double lsd = log.back().at("valid_lsd_4_8");
      const double input = log.back().at("valid_input_lsd_4_8");
      const double decrease = 1.0 - cyc1 / cyc0;
      Record("CycleGAN smoke", decrease >= kCycleDecrease && lsd < input,
             StrCat("valid cycle_loss ", Fmt(cyc0), " -> ", Fmt(cyc1), " (-",
                    Fmt(100 * decrease, 1), "%, need ", 100 * kCycleDecrease, "%) over ",
                    log.size() - 1, " epochs; G_ab LSD 4-8 ", Fmt(lsd, 2), " vs identity ",
                    Fmt(input, 2), " dB"));
    }

    // Domain clustering of first-layer FiLM activations.
    {
      bool ok = true;
      std::string detail = "domain silhouette gap per seed:";
      for (int seed = 1; seed <= kSeeds; ++seed) {
        CommandOptions v;
        v.checkpoint = RunName(seed, true);
        v.force = true;
        const nlohmann::json report = CmdVisualizeFilm(base, v);
        const nlohmann::json &d = report.at("silhouette").at("domain");
        const double gap = d.at("gap");
        ok = ok && gap >= kSilhouetteGap;
        detail += StrCat(" ", Fmt(gap), " (", Fmt(d.at("silhouette").get<double>()), " vs shuffled ",
                         Fmt(d.at("shuffled").get<double>()), ")");
        if (seed == 1) detail = StrCat("layer ", report.at("layer").get<int>(), ", ", detail);
      }
      Record("FiLM domain clustering", ok, StrCat(detail, "; need >= ", kSilhouetteGap));
    }

    FilmIdentity(runs);
  }

  void FilmIdentity(const fs::path &runs) {
    std::vector<std::string> checkpoints;
    for (int seed = 1; seed <= kSeeds; ++seed)
      checkpoints.push_back((runs / (RunName(seed, true) + ".ckpt")).string());
    checkpoints.push_back((runs / "cyclegan.ckpt").string());

    bool exact = true;
    double worst = 0;
    int layers = 0;
    NoGradGuard no_grad;
    for (const std::string &path : checkpoints) {
      const auto model = GanModel::Load(path);
      const Generator &g = model->ForwardGenerator();
      const Variable x(Probe(4000, 17));
      const Variable cond = SelfCondition(g, model->Condition(), x);
      exact = exact && g.Forward(x, cond, 0.0).Value() == g.Forward(x, Variable()).Value();
      if (model->Kind() == GanKind::kCgan) {
        const Discriminator &d = *model->Cgan(nullptr).d;
        exact = exact && d.Forward(x, cond, 0.0).Value() == d.Forward(x, Variable()).Value();
      }
      std::mt19937_64 rng(23);
      std::normal_distribution<double> n;
      for (int64_t l = 0; l < g.Config().separator_layers; ++l) {
        if (!g.HasFilm(l)) continue;
        ++layers;
        Tensor h({1, g.SeparatorChannels(l), 64});
        for (int64_t i = 0; i < h.Size(); ++i) h[i] = n(rng);
        const Variable hv(h);
        const FilmParams p = g.FilmParameters(l, cond);
        const Tensor y0 = FilmApply(hv, p, 0.0).Value();
        const Tensor y1 = FilmApply(hv, p, 1.0).Value();
        exact = exact && y0 == h;
        for (double a : {0.25, 0.5, 0.75}) {
          Tensor line = y0;
          line.AddScaled(y0, -a);
          line.AddScaled(y1, a);
          worst = std::max(worst, MaxAbsDiff(FilmApply(hv, p, a).Value(), line));
        }
      }
    }
    Record("FiLM identity", exact && worst <= kLinearityTolerance,
           StrCat(checkpoints.size(), " checkpoints: alpha=0 ", exact ? "bit-exact" : "NOT bit-exact",
                  " for G and D; max linearity error ", worst, " over ", layers,
                  " FiLM layers (tolerance ", kLinearityTolerance, ")"));
  }

  void Determinism() {
    std::vector<std::string> logs, ckpts;
    for (const char *dir : {"det1", "det2"}) {
      Progress(StrCat("determinism run ", dir));
      const fs::path runs = work_ / dir;
      const RunConfig c =
          Config({StrCat("cgan.epochs=", kDeterminismEpochs), "cgan.name=det"}, runs);
      CmdTrainCgan(c, {});
      logs.push_back(ReadBytes((runs / "det.log.jsonl").string()));
      ckpts.push_back(ReadBytes((runs / "det.ckpt").string()));
    }
    const bool same_run = logs[0] == logs[1] && ckpts[0] == ckpts[1] && !ckpts[0].empty();

    // Load, save, reload.
    const std::string first = (work_ / "det1" / "det.ckpt").string();
    const std::string copy = (work_ / "det1" / "det-copy.ckpt").string();
    const auto a = GanModel::Load(first);
    a->Save(copy);
    const auto b = GanModel::Load(copy);
    bool same_model = Snapshot(a->GeneratorParameters()) == Snapshot(b->GeneratorParameters()) &&
                      Snapshot(a->DiscriminatorParameters()) ==
                          Snapshot(b->DiscriminatorParameters()) &&
                      Snapshot(a->FrozenParameters()) == Snapshot(b->FrozenParameters());
    const Tensor probe = Probe(6000, 29);
    same_model = same_model && a->Extend(probe) == b->Extend(probe);

    // Re-evaluating a checkpoint reproduces its report.
    const RunConfig c = Config({}, work_ / "runs");
    CommandOptions opts;
    opts.checkpoint = RunName(1, true);
    opts.force = true;
    const std::string eval_path = (work_ / "runs" / (RunName(1, true) + ".eval.json")).string();
    const std::string before = ReadBytes(eval_path);
    CmdEval(c, opts);
    const bool same_eval = !before.empty() && before == ReadBytes(eval_path);

    Record("determinism and round trip", same_run && same_model && same_eval,
           StrCat("repeated training ", same_run ? "byte-identical" : "DIFFERS",
                  "; checkpoint reload ", same_model ? "identical" : "DIFFERS",
                  "; re-evaluation ", same_eval ? "identical" : "DIFFERS"));
  }

  std::string config_, unit_dir_;
  fs::path work_;
  std::vector<Outcome> outcomes_;
};

}  // namespace
}  // namespace selffilm

int main(int argc, char **argv) {
  using namespace selffilm;
  CLI::App app{"End-to-end acceptance checks on the tiny configuration"};
  std::string config = SELFFILM_SOURCE_DIR "/configs/tiny.json";
  std::string unit_dir = SELFFILM_UNIT_DIR;
  std::string work;
  bool strict = false, keep = false;
  app.add_option("--config", config, "Run configuration")->check(CLI::ExistingFile);
  app.add_option("--unit-dir", unit_dir, "Directory holding the unit test binaries");
  app.add_option("--work", work, "Scratch directory (default: fresh temp dir)");
  app.add_flag("--keep", keep, "Keep the scratch directory");
  app.add_flag("--strict", strict, "Exit 1 when any criterion fails");
  CLI11_PARSE(app, argc, argv);

  namespace fs = std::filesystem;
  const bool temp = work.empty();
  if (temp)
    work = (fs::temp_directory_path() / StrCat("selffilm-acceptance-", ::getpid())).string();
  fs::remove_all(work);
  fs::create_directories(work);

  std::vector<Outcome> outcomes;
  int status = 0;
  try {
    outcomes = Acceptance(config, unit_dir, work).Run();
  } catch (const std::exception &e) {
    std::cerr << "acceptance: aborted: " << e.what() << "\n";
    status = 2;
  }
  if (temp && !keep) fs::remove_all(work);
  if (status) return status;

  int passed = 0;
  for (const Outcome &o : outcomes) {
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << o.criterion << ": " << o.detail << "\n";
    passed += o.pass;
  }
  std::cout << "acceptance: " << passed << "/" << outcomes.size() << " criteria passed\n";
  return strict && passed != static_cast<int>(outcomes.size()) ? 1 : 0;
}
