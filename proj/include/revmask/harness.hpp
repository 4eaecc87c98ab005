#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "revmask/audio_io.hpp"
#include "revmask/ci_chain.hpp"
#include "revmask/masking.hpp"
#include "revmask/metrics.hpp"
#include "revmask/reverb.hpp"
#include "revmask/tf_analysis.hpp"

namespace revmask {

struct ExperimentConfig {
  std::filesystem::path corpus_dir;
  // Load the RIR from a WAV file when set, otherwise synthesize one.
  std::optional<std::filesystem::path> rir_path;
  SynthRirParams synthetic_rir;
  double direct_window_ms = 5.0;
  AnalysisConfig analysis;
  std::size_t maxima = 8;
  std::vector<double> tau_list{-12, -9, -6, -3, 0, 3, 6, 9, 12, 15, 18};
  std::vector<double> beta_list{0.05, 0.1, 0.25, 0.5, 1, 2, 4, 8, 16, 32, 64};
  double alpha = 1.0;
  // Threshold of the binary reference mask used for hit/false-alarm rates.
  double reference_tau_db = -6.0;
  std::filesystem::path output_dir = "out";
  // Seeds the synthetic RIR and the optional random vocoder phases.
  std::uint64_t seed = 1;
  std::size_t jobs = 1;
  bool emit_audio = false;
  bool emit_images = false;
  int vocoder_rate = 16000;
  bool random_phase = false;
};

// Throws kConfig on any violated constraint.
void validate(const ExperimentConfig& cfg);

// Flat JSON object; unknown keys and wrong types are kConfig errors.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string to_json(const ExperimentConfig& cfg);

struct MaskSpec {
  enum class Kind { kDirect, kUnmitigated, kIbm, kIrm };
  Kind kind = Kind::kUnmitigated;
  double param = 0.0;  // tau (dB) for kIbm, beta for kIrm

  static MaskSpec direct() { return {Kind::kDirect, 0.0}; }
  static MaskSpec unmitigated() { return {Kind::kUnmitigated, 0.0}; }
  static MaskSpec binary(double tau_db) { return {Kind::kIbm, tau_db}; }
  static MaskSpec ratio(double beta) { return {Kind::kIrm, beta}; }

  // "direct", "unmitigated", "ibm:<tau>", "irm:<beta>"
  static MaskSpec parse(std::string_view text);
  std::string kind_name() const;
  std::string label() const;

  friend bool operator==(const MaskSpec&, const MaskSpec&) = default;
};

// The two baselines followed by every tau and every beta, in list order.
std::vector<MaskSpec> sweep_conditions(const ExperimentConfig& cfg);

RoomImpulseResponse load_rir(const ExperimentConfig& cfg);

// Everything about one sentence that does not depend on the condition.
struct PreparedSentence {
  std::string id;
  Waveform reverberant;
  Waveform direct;
  double esnr_db = 0.0;
  EnvelopeGrid reverberant_grid;
  EnvelopeGrid direct_grid;
  SrrGrid srr;
  Electrodogram reference;
  GainMask reference_mask;
};

// Resamples to the analysis rate and renders y and d.
ReverberantPair render_sentence(const Waveform& sentence,
                                const RoomImpulseResponse& rir,
                                const ExperimentConfig& cfg);
// `level_gain` scales y and d alike; group RMS normalization picks it.
PreparedSentence prepare_sentence(std::string id, ReverberantPair rendered,
                                  double level_gain, const ExperimentConfig& cfg);

struct ConditionResult {
  std::string sentence_id;
  MaskSpec spec;
  double esnr_db = 0.0;
  std::optional<double> density;
  double similarity = 0.0;
  std::optional<double> hit_rate;
  std::optional<double> false_alarm_rate;
  std::optional<GainMask> mask;
  Electrodogram electrodogram;
};

ConditionResult evaluate_condition(const PreparedSentence& sentence,
                                   const MaskSpec& spec,
                                   const ExperimentConfig& cfg);

// Full chain for one sentence: resample, normalize (as a group of one),
// reverberate, analyze, mask, select maxima, score against the direct path.
ConditionResult run_condition(const Waveform& sentence, const ExperimentConfig& cfg,
                              const MaskSpec& spec, std::string sentence_id = "sentence");

struct CorpusEntry {
  std::string id;
  Waveform waveform;
};

// *.wav files of a directory, sorted by file name; id = file stem.
std::vector<CorpusEntry> load_corpus(const std::filesystem::path& dir);

// Resamples, renders and group-normalizes every sentence, then prepares it.
std::vector<PreparedSentence> prepare_corpus(std::vector<CorpusEntry> corpus,
                                             const ExperimentConfig& cfg);

struct SweepResult {
  std::vector<ConditionResult> details;  // sentence-major, condition order
  std::string csv;
};

// Scores every (sentence, condition) pair using cfg.jobs worker threads and
// serializes the table; the bytes do not depend on cfg.jobs.
SweepResult run_sweep(const std::vector<PreparedSentence>& sentences,
                      const ExperimentConfig& cfg);
// Loads the corpus, runs the sweep, writes <output_dir>/scores.csv and any
// requested audio/images.
SweepResult run_sweep(const ExperimentConfig& cfg);

std::string format_scores_csv(const std::vector<ConditionResult>& details,
                              const std::vector<MaskSpec>& conditions,
                              std::span<const std::string> sentence_ids);

// Grayscale binary PGM: one column per frame, one row per channel with the
// lowest channel at the bottom, intensity proportional to amplitude over the
// electrodogram maximum. Writes `<path>.txt` with axis metadata.
void render_electrodogram(const Electrodogram& e, const std::filesystem::path& path);

// Dense frames x channels CSV with '#' metadata lines for frame rate and
// center frequencies.
void write_electrodogram_csv(const Electrodogram& e, const std::filesystem::path& path);
Electrodogram read_electrodogram_csv(const std::filesystem::path& path);
void write_mask_csv(const GainMask& mask, const std::filesystem::path& path);

// Runs fn(i) for i in [0, count) on `jobs` threads. If any call throws, the
// exception from the lowest index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

// Locale-independent number formatting used by every text output.
std::string format_fixed(double value, int decimals = 6);
std::string format_shortest(double value);

}  // namespace revmask
