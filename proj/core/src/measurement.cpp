#include <algorithm>

#include "rydstab/dynamics.hpp"
#include "rydstab/error.hpp"

namespace rydstab::dynamics {

using system::AtomSystem;
using system::Role;

const char* to_string(MeasurementScheme scheme) {
  switch (scheme) {
    case MeasurementScheme::kRydbergLoss: return "rydberg_loss";
    case MeasurementScheme::kBlastOne: return "blast_1";
    case MeasurementScheme::kBoth: return "both";
  }
  return "?";
}

double level_survival(const AtomSystem& system, int site, int level, MeasurementScheme scheme,
                      const SurvivalModel& model) {
  const system::AtomSite& atom = system.sites().at(site);
  const system::SpeciesParams& sp = system.species(atom.role);
  if (atom.role == Role::kAncilla) return level == sp.rydberg_level ? 0.0 : 1.0;
  const bool rydberg_lost = scheme != MeasurementScheme::kBlastOne;
  const bool blast = scheme != MeasurementScheme::kRydbergLoss;
  if (level == sp.rydberg_level) return rydberg_lost ? 0.0 : 1.0;
  if (level == system::level::kOne && blast) return model.blast_infidelity;
  return 1.0;
}

MeasurementRecord measure(const qcore::QuantumState& state, const AtomSystem& system,
                          MeasurementScheme scheme, bool postselect_data_survival,
                          const SurvivalModel& model, std::mt19937_64& rng) {
  const qcore::LevelSpace& space = system.space();
  if (!(state.space() == space)) throw InvalidArgument("measure: state does not match system");

  Eigen::VectorXd probs = state.probabilities().cwiseMax(0.0);
  std::discrete_distribution<int> pick(probs.data(), probs.data() + probs.size());
  const int index = pick(rng);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  MeasurementRecord rec;
  const int n = system.num_sites();
  rec.loaded.assign(n, false);
  rec.survived.assign(n, false);
  rec.outcome.assign(n, -1);
  bool all_data_survived = true;
  for (int site = 0; site < n; ++site) {
    const int h = system.hilbert_site(site);
    if (h < 0) continue;
    const int level = space.level_of(index, h);
    const bool ancilla = system.sites()[site].role == Role::kAncilla;
    const double background =
        ancilla ? model.ancilla_background_loss : model.data_background_loss;
    const double p = level_survival(system, site, level, scheme, model) * (1.0 - background);
    const bool survived = uniform(rng) < p;
    rec.loaded[site] = true;
    rec.outcome[site] = level;
    rec.survived[site] = survived;
    if (ancilla) {
      rec.ancilla_loaded = true;
      rec.ancilla_survived = survived;
    } else {
      ++rec.n_loaded;
      if (survived) ++rec.n0;
      all_data_survived = all_data_survived && survived;
    }
  }
  rec.n1 = rec.n_loaded - rec.n0;
  rec.accepted = !postselect_data_survival || all_data_survived;
  return rec;
}

SurvivalProbability ancilla_survival(const qcore::QuantumState& state, const AtomSystem& system,
                                     MeasurementScheme scheme, bool postselect_data_survival,
                                     const SurvivalModel& model) {
  const qcore::LevelSpace& space = system.space();
  if (!(state.space() == space)) throw InvalidArgument("ancilla_survival: state does not match system");
  const int anc = system.ancilla_site();
  if (anc < 0 || system.hilbert_site(anc) < 0) {
    throw InvalidArgument("ancilla_survival: no loaded ancilla");
  }
  const int anc_h = system.hilbert_site(anc);

  // Per loaded data atom: survival probability for each level.
  std::vector<std::pair<int, std::vector<double>>> data;
  for (int site : system.loaded_sites()) {
    if (system.sites()[site].role != Role::kData) continue;
    std::vector<double> by_level(system.species(Role::kData).num_levels);
    for (int l = 0; l < static_cast<int>(by_level.size()); ++l) {
      by_level[l] = level_survival(system, site, l, scheme, model);
    }
    data.emplace_back(system.hilbert_site(site), std::move(by_level));
  }

  const Eigen::VectorXd probs = state.probabilities();
  double accepted = 0.0;
  double joint = 0.0;
  for (int i = 0; i < space.total_dim(); ++i) {
    double w = std::max(probs(i), 0.0);
    if (postselect_data_survival) {
      for (const auto& [h, by_level] : data) w *= by_level[space.level_of(i, h)];
    }
    accepted += w;
    w *= level_survival(system, anc, space.level_of(i, anc_h), scheme, model);
    joint += w;
  }
  if (!(accepted > 0.0)) {
    throw NumericalError("ancilla_survival: postselection rejects every outcome");
  }
  SurvivalProbability out;
  out.ideal = std::clamp(joint / accepted, 0.0, 1.0);
  out.with_background = out.ideal * (1.0 - model.ancilla_background_loss);
  out.acceptance = std::min(accepted, 1.0);
  return out;
}

}  // namespace rydstab::dynamics
