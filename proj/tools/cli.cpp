// tools/cli.cpp

// Copyright 2026  The magdiar Authors

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

#include "cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "magdiar/diarmetrics.hpp"
#include "magdiar/error.hpp"
#include "magdiar/io.hpp"
#include "magdiar/magface.hpp"
#include "magdiar/pipeline.hpp"
#include "magdiar/quality.hpp"
#include "magdiar/random.hpp"
#include "magdiar/synth.hpp"
#include "magdiar/vbx.hpp"
#include "magdiar/verify.hpp"

namespace magdiar {

namespace {

namespace fs = std::filesystem;

// Reads and parses a file, prefixing any failure with its path.
template <typename Parse>
auto load(const std::string& path, Parse parse) {
  const std::string text = read_text_file(path);
  try {
    return parse(text);
  } catch (const std::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void save(const fs::path& path, const std::string& text) { write_text_file(path, text); }

std::string pct(double v) { return format_fixed(100.0 * v, 2); }

// --- verify -------------------------------------------------------------

struct VerifyArgs {
  std::string embeddings, trials, backend = "both", params, scores;
  std::optional<double> s, gamma;
  double p_target = 0.01;
  std::vector<double> reject;
};

PrecisionParams precision_from(const std::string& params_path, const std::optional<double>& s,
                               const std::optional<double>& gamma) {
  PrecisionParams p;
  if (!params_path.empty()) p = load(params_path, read_precision_params);
  if (s) p.s = *s;
  if (gamma) p.gamma = *gamma;
  p.validate();
  return p;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const PrecisionParams precision = precision_from(a.params, a.s, a.gamma);
  std::vector<ScoringBackend> backends;
  if (a.backend == "cosine" || a.backend == "both") backends.push_back(CosineBackend{});
  if (a.backend == "gme" || a.backend == "both") backends.push_back(GmeBackend{precision});
  if (!(a.p_target > 0.0 && a.p_target < 1.0)) throw Error("--p-target must lie in (0,1)");
  for (double f : a.reject) {
    if (!(f >= 0.0 && f < 1.0)) throw Error("--reject fractions must lie in [0,1)");
  }
  if (!std::is_sorted(a.reject.begin(), a.reject.end())) {
    throw Error("--reject fractions must be sorted ascending");
  }

  const EmbeddingSet set = load(a.embeddings, read_embedding_archive);
  const TrialList trials = load(a.trials, read_trials);

  std::ostringstream report;
  report << "backend EER% minDCF\n";
  std::vector<std::vector<RejectionPoint>> curves;
  for (const auto& backend : backends) {
    const auto scores = score_trials(set, trials, backend);
    const VerificationReport r = evaluate_scores(scores, a.p_target);
    report << backend_name(backend) << ' ' << pct(r.eer) << ' ' << format_fixed(r.min_dcf, 4)
           << '\n';
    if (!a.scores.empty()) {
      const std::string path =
          backends.size() == 1 ? a.scores : a.scores + "." + backend_name(backend);
      save(path, write_scores(scores));
    }
    if (!a.reject.empty()) curves.push_back(rejection_curve(set, trials, backend, a.reject));
  }
  if (!curves.empty()) {
    report << "fraction kept";
    for (const auto& backend : backends) report << ' ' << backend_name(backend) << "_EER%";
    report << '\n';
    for (std::size_t i = 0; i < a.reject.size(); ++i) {
      report << format_fixed(a.reject[i], 2) << ' ' << curves[0][i].kept;
      for (const auto& curve : curves) {
        report << ' ' << (curve[i].eer ? pct(*curve[i].eer) : std::string("undefined"));
      }
      report << '\n';
    }
  }
  out << report.str();
  return 0;
}

// --- diarize ------------------------------------------------------------

struct DiarizeArgs {
  std::string embeddings, vad, osd, output, config, params;
  std::string cluster = "ahc", metric = "cosine", two_step;
  double threshold = 0.0;
  double percentile = 0.0;
  std::optional<double> s, gamma, sigma_b2, sigma_w2, p_loop, f_a, f_b;
  std::optional<int> max_speakers;
  bool up = false;
  bool no_length_norm = false;
  unsigned jobs = 1;
};

int cmd_diarize(const DiarizeArgs& a, std::ostream& out) {
  ClusteringConfigFile file_cfg;
  if (!a.config.empty()) {
    file_cfg = load(a.config, [](const std::string& t) { return read_clustering_config(t); });
  }
  PldaParams plda = file_cfg.plda;
  if (a.sigma_b2) plda.sigma_b2 = *a.sigma_b2;
  if (a.sigma_w2) plda.sigma_w2 = *a.sigma_w2;
  plda.validate();

  AhcClustering ahc;
  ahc.threshold = a.threshold;
  if (a.metric == "plda") {
    ahc.metric = PldaMetric{plda};
  } else if (a.metric != "cosine") {
    throw Error("--metric must be cosine or plda");
  }

  TwoStepConfig cfg;
  if (a.cluster == "ahc") {
    if (a.up) throw Error("--up requires --cluster vbx");
    cfg.base = ahc;
  } else if (a.cluster == "vbx") {
    VbxClustering v;
    v.init = ahc;
    v.vbx = file_cfg.vbx;
    if (a.p_loop) v.vbx.p_loop = *a.p_loop;
    if (a.f_a) v.vbx.f_a = *a.f_a;
    if (a.f_b) v.vbx.f_b = *a.f_b;
    if (a.max_speakers) v.vbx.max_speakers = *a.max_speakers;
    v.vbx.validate();
    v.plda = plda;
    v.uncertainty = a.up;
    v.precision = precision_from(a.params, a.s, a.gamma);
    v.length_normalize = !a.no_length_norm;
    cfg.base = v;
  } else {
    throw Error("--cluster must be ahc or vbx");
  }
  if (!a.two_step.empty()) {
    cfg.variant = parse_two_step_variant(a.two_step);
    if (!(a.percentile >= 0.0 && a.percentile <= 100.0)) {
      throw Error("--percentile must lie in [0,100]");
    }
    cfg.percentile = a.percentile;
  } else if (a.percentile != 0.0) {
    throw Error("--percentile requires --two-step");
  }
  if (a.jobs < 1) throw Error("--jobs must be >= 1");

  const EmbeddingSet set = load(a.embeddings, read_embedding_archive);
  const std::string default_rec =
      set.recordings().size() == 1 ? set.recordings().front() : std::string();
  auto timelines = [&](const std::string& path) {
    return load(path, [&](const std::string& t) { return read_timelines(t, default_rec); });
  };
  DiarizationInputs inputs;
  if (!a.vad.empty()) inputs.vad = timelines(a.vad);
  if (!a.osd.empty()) inputs.osd = timelines(a.osd);

  const std::string rttm = write_rttm(diarize(set, cfg, inputs, a.jobs));
  if (a.output.empty() || a.output == "-") {
    out << rttm;
  } else {
    save(a.output, rttm);
  }
  return 0;
}

// --- score --------------------------------------------------------------

struct ScoreArgs {
  std::string ref, hyp;
  double collar = 0.0;
  bool no_overlap = false;
};

int cmd_score(const ScoreArgs& a, std::ostream& out) {
  if (!(a.collar >= 0.0)) throw Error("--collar must be non-negative");
  const Annotation ref = load(a.ref, parse_rttm);
  const Annotation hyp = load(a.hyp, parse_rttm);
  out << format_report(score_diarization(ref, hyp, a.collar, !a.no_overlap));
  return 0;
}

// --- synth --------------------------------------------------------------

struct SynthArgs {
  std::string out_dir, mode = "meeting";
  SynthSpec meeting;
  TrialSynthSpec trials;
  // Unset options keep the generator defaults of the chosen mode.
  std::optional<int> n_speakers, dim;
  std::optional<double> within_std, noise_std, noise_fraction;
  std::uint64_t seed = 0;
};

template <class T>
void override_with(T& field, const std::optional<T>& value) {
  if (value) field = *value;
}

int cmd_synth(SynthArgs a, std::ostream& out) {
  fs::create_directories(a.out_dir);
  const fs::path dir(a.out_dir);
  if (a.mode == "meeting") {
    SynthSpec& s = a.meeting;
    override_with(s.n_speakers, a.n_speakers);
    override_with(s.dim, a.dim);
    override_with(s.within_std, a.within_std);
    override_with(s.noise_std, a.noise_std);
    override_with(s.noise_fraction, a.noise_fraction);
    s.seed = a.seed;
    const SynthMeeting m = generate_meeting(s);
    save(dir / "embeddings.jsonl", write_embedding_archive(m.embeddings));
    save(dir / "ref.rttm", write_rttm(m.reference));
    save(dir / "vad.txt", write_timeline(m.vad));
    save(dir / "osd.txt", write_timeline(m.osd));
    out << "wrote " << m.embeddings.size() << " embeddings, " << m.reference.turns().size()
        << " turns, " << m.osd.intervals().size() << " overlap regions to " << a.out_dir << '\n';
  } else if (a.mode == "trials") {
    TrialSynthSpec& s = a.trials;
    override_with(s.n_speakers, a.n_speakers);
    override_with(s.dim, a.dim);
    override_with(s.within_std, a.within_std);
    override_with(s.noise_std, a.noise_std);
    override_with(s.degrade_fraction, a.noise_fraction);
    s.seed = a.seed;
    const SynthTrials t = generate_trials(s);
    save(dir / "embeddings.jsonl", write_embedding_archive(t.embeddings));
    save(dir / "trials.txt", write_trials(t.trials));
    out << "wrote " << t.embeddings.size() << " embeddings, " << t.trials.size()
        << " trials to " << a.out_dir << '\n';
  } else {
    throw Error("--mode must be meeting or trials");
  }
  return 0;
}

// --- magface-check -------------------------------------------------------

struct MagfaceArgs {
  int batches = 20, n = 8, classes = 5, dim = 16;
  double step = 1e-5;
  std::uint64_t seed = 0;
  MagfaceParams params;
};

int cmd_magface_check(const MagfaceArgs& a, std::ostream& out) {
  if (a.batches < 1) throw Error("--batches must be >= 1");
  if (!(a.step > 0.0)) throw Error("--step must be positive");
  a.params.validate();
  Rng rng(a.seed);
  double worst = 0.0;
  out << "batch loss max_rel_error\n";
  for (int b = 0; b < a.batches; ++b) {
    Rng batch_rng = rng.split(static_cast<std::uint64_t>(b));
    const MagfaceBatch batch = random_magface_batch(batch_rng, a.n, a.classes, a.dim, a.params);
    const double loss = magface_loss(batch, a.params).loss;
    const double e = check_magface_gradient(batch, a.params, a.step).max_rel_error();
    worst = std::max(worst, e);
    char line[96];
    std::snprintf(line, sizeof(line), "%d %.6f %.3e\n", b, loss, e);
    out << line;
  }
  char line[64];
  std::snprintf(line, sizeof(line), "max %.3e\n", worst);
  out << line;
  return 0;
}

// --- fit-transform -------------------------------------------------------

struct FitArgs {
  std::string embeddings, output;
  std::optional<double> target_median;
  double gamma_max = 2.0, gamma_step = 0.01, cap = 20.0;
};

int cmd_fit_transform(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const EmbeddingSet dev = load(a.embeddings, read_embedding_archive);
  const double target = a.target_median.value_or(5.0 * static_cast<double>(dev.dim()));
  if (!(target > 0.0)) throw Error("--target-median must be positive");
  if (!(a.gamma_max >= 0.0 && a.gamma_step > 0.0)) throw Error("bad gamma grid");
  const PrecisionFit fit = fit_precision_params(dev, target, {a.gamma_max, a.gamma_step}, a.cap);
  if (fit.warning) err << "warning: " << *fit.warning << '\n';
  const std::string text = write_precision_params(fit.params);
  if (a.output.empty() || a.output == "-") {
    out << text;
  } else {
    save(a.output, text);
  }
  out << "abs_correlation " << format_fixed(fit.abs_correlation, 4) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Magnitude-aware speaker verification and diarization toolkit", "magdiar"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Score trials and report EER/minDCF");
  verify->add_option("--embeddings", va.embeddings, "Embedding archive (JSON lines)")->required();
  verify->add_option("--trials", va.trials, "Trial list")->required();
  verify->add_option("--backend", va.backend, "cosine, gme or both")
      ->check(CLI::IsMember({"cosine", "gme", "both"}));
  verify->add_option("--params", va.params, "Precision parameter file from fit-transform");
  verify->add_option("--s", va.s, "Precision scale s");
  verify->add_option("--gamma", va.gamma, "Duration weight gamma");
  verify->add_option("--p-target", va.p_target, "Target prior for minDCF");
  verify->add_option("--reject", va.reject, "Rejection fractions, comma separated")
      ->delimiter(',');
  verify->add_option("--scores", va.scores, "Write per-trial scores here");

  DiarizeArgs da;
  auto* diar = app.add_subcommand("diarize", "Cluster segment embeddings into an RTTM");
  diar->add_option("--embeddings", da.embeddings, "Embedding archive (JSON lines)")->required();
  diar->add_option("--vad", da.vad, "Speech regions");
  diar->add_option("--osd", da.osd, "Overlapped speech regions");
  diar->add_option("--out,-o", da.output, "Output RTTM (default stdout)");
  diar->add_option("--cluster", da.cluster, "ahc or vbx")
      ->check(CLI::IsMember({"ahc", "vbx"}));
  diar->add_option("--metric", da.metric, "AHC similarity: cosine or plda")
      ->check(CLI::IsMember({"cosine", "plda"}));
  diar->add_option("--threshold", da.threshold, "AHC stopping threshold");
  diar->add_option("--config", da.config, "VBx/PLDA key-value file");
  diar->add_option("--sigma-b2", da.sigma_b2, "PLDA between-speaker variance");
  diar->add_option("--sigma-w2", da.sigma_w2, "PLDA within-speaker variance");
  diar->add_option("--p-loop", da.p_loop, "VBx self-transition probability");
  diar->add_option("--fa", da.f_a, "VBx acoustic scaling");
  diar->add_option("--fb", da.f_b, "VBx speaker regularization");
  diar->add_option("--max-speakers", da.max_speakers, "VBx speaker cap");
  diar->add_flag("--up", da.up, "Propagate magnitude-based uncertainty in VBx");
  diar->add_option("--params", da.params, "Precision parameter file");
  diar->add_option("--s", da.s, "Precision scale s");
  diar->add_option("--gamma", da.gamma, "Duration weight gamma");
  diar->add_flag("--no-length-norm", da.no_length_norm, "Cluster raw vectors in VBx");
  diar->add_option("--two-step", da.two_step, "Two-step variant: 2.1, 2.2 or 2.3");
  diar->add_option("--percentile", da.percentile, "Magnitude percentile left out of step one");
  diar->add_option("--jobs", da.jobs, "Recordings processed in parallel");

  ScoreArgs sa;
  auto* score = app.add_subcommand("score", "DER/JER of a hypothesis RTTM");
  score->add_option("--ref", sa.ref, "Reference RTTM")->required();
  score->add_option("--hyp", sa.hyp, "Hypothesis RTTM")->required();
  score->add_option("--collar", sa.collar, "Forgiveness collar in seconds");
  score->add_flag("--no-overlap", sa.no_overlap, "Exclude overlapped reference speech");

  SynthArgs ya;
  auto* synth = app.add_subcommand("synth", "Generate a synthetic meeting or trial set");
  synth->add_option("--out", ya.out_dir, "Output directory")->required();
  synth->add_option("--mode", ya.mode, "meeting or trials")
      ->check(CLI::IsMember({"meeting", "trials"}));
  synth->add_option("--speakers", ya.n_speakers, "Number of speakers");
  synth->add_option("--dim", ya.dim, "Embedding dimension");
  synth->add_option("--within-std", ya.within_std, "Within-speaker noise");
  synth->add_option("--noise-std", ya.noise_std, "Extra noise of degraded items");
  synth->add_option("--noise-fraction", ya.noise_fraction, "Fraction of degraded items");
  synth->add_option("--seed", ya.seed, "Random seed");
  synth->add_option("--segments", ya.meeting.n_segments, "Meeting: approximate segment count");
  synth->add_option("--turn-len", ya.meeting.turn_len_s, "Meeting: mean turn length (s)");
  synth->add_option("--overlap-prob", ya.meeting.overlap_prob, "Meeting: overlap probability");
  synth->add_option("--recording", ya.meeting.recording_id, "Meeting: recording id");
  synth->add_option("--utterances", ya.trials.utterances_per_speaker,
                    "Trials: utterances per speaker");
  synth->add_option("--targets", ya.trials.n_target, "Trials: target trial count");
  synth->add_option("--nontargets", ya.trials.n_nontarget, "Trials: nontarget trial count");
  synth->add_option("--duration-slope", ya.trials.duration_slope,
                    "Trials: magnitude loss per second of duration");

  MagfaceArgs ma;
  auto* mag = app.add_subcommand("magface-check", "Finite-difference check of the MagFace gradient");
  mag->add_option("--batches", ma.batches, "Number of random batches");
  mag->add_option("--n", ma.n, "Batch size");
  mag->add_option("--classes", ma.classes, "Number of classes");
  mag->add_option("--dim", ma.dim, "Embedding dimension");
  mag->add_option("--step", ma.step, "Finite-difference step");
  mag->add_option("--seed", ma.seed, "Random seed");
  mag->add_option("--scale", ma.params.scale_s, "Logit scale s");
  mag->add_option("--lambda-g", ma.params.lambda_g, "Regularizer weight");

  FitArgs fa;
  auto* fit = app.add_subcommand("fit-transform", "Fit the magnitude-to-precision transform");
  fit->add_option("--embeddings", fa.embeddings, "Development embedding archive")->required();
  fit->add_option("--out,-o", fa.output, "Output parameter file (default stdout)");
  fit->add_option("--target-median", fa.target_median,
                  "Median precision after scaling (default 5 x dim)");
  fit->add_option("--gamma-max", fa.gamma_max, "Largest gamma on the grid");
  fit->add_option("--gamma-step", fa.gamma_step, "Grid step");
  fit->add_option("--cap", fa.cap, "Duration cap (s)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*verify) return cmd_verify(va, out);
    if (*diar) return cmd_diarize(da, out);
    if (*score) return cmd_score(sa, out);
    if (*synth) return cmd_synth(ya, out);
    if (*mag) return cmd_magface_check(ma, out);
    if (*fit) return cmd_fit_transform(fa, out, err);
  } catch (const std::exception& e) {
    err << "magdiar: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace magdiar
