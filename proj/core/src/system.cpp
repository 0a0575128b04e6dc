#include "rydstab/system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rydstab/error.hpp"
#include "rydstab/units.hpp"

namespace rydstab::system {
namespace {

constexpr double kGhzToMhz = 1000.0;

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x_um - b.x_um, a.y_um - b.y_um);
}

double pair_c6(const AtomSite& a, const AtomSite& b, const SpeciesParams& ancilla,
               const SpeciesParams& data, double c6_inter) {
  if (a.role != b.role) return c6_inter;
  const SpeciesParams& species = a.role == Role::kAncilla ? ancilla : data;
  if (!species.c6_intra_ghz_um6) {
    throw InvalidArgument("species '" + species.name +
                          "' has no intraspecies C6 but two such atoms are present");
  }
  return *species.c6_intra_ghz_um6;
}

void validate_species(const SpeciesParams& s) {
  if (s.c6_intra_ghz_um6 && !(*s.c6_intra_ghz_um6 > 0.0)) {
    throw InvalidArgument("species '" + s.name + "': c6_intra must be > 0");
  }
  if (s.num_levels < 2 || s.coupled_level < 0 || s.coupled_level >= s.num_levels ||
      s.rydberg_level < 0 || s.rydberg_level >= s.num_levels ||
      s.coupled_level == s.rydberg_level) {
    throw InvalidArgument("species '" + s.name + "': inconsistent level indices");
  }
}

}  // namespace

SpeciesParams SpeciesParams::sodium_ancilla() {
  return {"Na", std::nullopt, 2, level::kGround, level::kAncillaRydberg};
}

SpeciesParams SpeciesParams::cesium_data() {
  return {"Cs", kC6IntraCs, 3, level::kOne, level::kDataRydberg};
}

double vdw_strength(double c6_ghz_um6, double r_um) {
  if (!(r_um > 0.0)) throw InvalidArgument("vdw_strength: distance must be > 0");
  return kGhzToMhz * c6_ghz_um6 / std::pow(r_um, 6);
}

double vdw_distance(double c6_ghz_um6, double v_mhz) {
  if (!(v_mhz > 0.0) || !(c6_ghz_um6 > 0.0)) {
    throw InvalidArgument("vdw_distance: c6 and v must be > 0");
  }
  return std::pow(kGhzToMhz * c6_ghz_um6 / v_mhz, 1.0 / 6.0);
}

double data_shift(int n_nearest, int n_next_nearest, double c6_ghz_um6, double side_um) {
  if (n_nearest < 0 || n_nearest > 2 || n_next_nearest < 0 || n_next_nearest > 1) {
    throw InvalidArgument("data_shift: neighbour counts out of range (0-2 nearest, 0-1 diagonal)");
  }
  return n_nearest * vdw_strength(c6_ghz_um6, side_um) +
         n_next_nearest * vdw_strength(c6_ghz_um6, std::sqrt(2.0) * side_um);
}

Eigen::MatrixXd interaction_table(const std::vector<AtomSite>& sites,
                                  const SpeciesParams& ancilla_species,
                                  const SpeciesParams& data_species, double c6_inter_ghz_um6,
                                  const std::vector<InteractionOverride>& overrides,
                                  const SystemOptions& options) {
  const int n = static_cast<int>(sites.size());
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const double r = distance(sites[a].position, sites[b].position);
      if (!(r > 0.0)) {
        throw InvalidArgument("sites " + std::to_string(a) + " and " + std::to_string(b) +
                              " coincide");
      }
      if (!sites[a].loaded || !sites[b].loaded) continue;
      const bool data_pair = sites[a].role == Role::kData && sites[b].role == Role::kData;
      if (data_pair && !options.data_data_interactions) continue;
      const double v = vdw_strength(
          pair_c6(sites[a], sites[b], ancilla_species, data_species, c6_inter_ghz_um6), r);
      table(a, b) = table(b, a) = v;
    }
  }
  for (const InteractionOverride& o : overrides) {
    if (o.site_a < 0 || o.site_a >= n || o.site_b < 0 || o.site_b >= n || o.site_a == o.site_b) {
      throw InvalidArgument("interaction override refers to invalid site pair");
    }
    if (!(o.v_mhz >= 0.0)) throw InvalidArgument("interaction override must be >= 0");
    if (!sites[o.site_a].loaded || !sites[o.site_b].loaded) continue;
    table(o.site_a, o.site_b) = table(o.site_b, o.site_a) = o.v_mhz;
  }
  return table;
}

AtomSystem::AtomSystem(SpeciesParams ancilla_species, SpeciesParams data_species,
                       double c6_inter_ghz_um6, std::vector<AtomSite> sites,
                       std::vector<InteractionOverride> overrides, SystemOptions options)
    : ancilla_species_(std::move(ancilla_species)),
      data_species_(std::move(data_species)),
      c6_inter_(c6_inter_ghz_um6),
      options_(options) {
  validate_species(ancilla_species_);
  validate_species(data_species_);
  if (!(c6_inter_ > 0.0)) throw InvalidArgument("c6_inter must be > 0");
  if (sites.empty()) throw InvalidArgument("AtomSystem needs at least one site");

  std::vector<int> order(sites.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    const AtomSite& sa = sites[a];
    const AtomSite& sb = sites[b];
    if (sa.role != sb.role) return sa.role == Role::kAncilla;
    if (sa.position.y_um != sb.position.y_um) return sa.position.y_um > sb.position.y_um;
    return sa.position.x_um < sb.position.x_um;
  });
  std::vector<int> new_index(sites.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    new_index[order[i]] = static_cast<int>(i);
    sites_.push_back(sites[order[i]]);
  }
  const int num_ancilla = static_cast<int>(
      std::count_if(sites_.begin(), sites_.end(),
                    [](const AtomSite& s) { return s.role == Role::kAncilla; }));
  if (num_ancilla > 1) throw InvalidArgument("at most one ancilla site is supported");
  ancilla_site_ = num_ancilla == 1 ? 0 : -1;

  for (InteractionOverride o : overrides) {
    if (o.site_a < 0 || o.site_a >= num_sites() || o.site_b < 0 || o.site_b >= num_sites()) {
      throw InvalidArgument("interaction override refers to invalid site");
    }
    o.site_a = new_index[o.site_a];
    o.site_b = new_index[o.site_b];
    overrides_.push_back(o);
  }
  for (const AtomSite& s : sites_) {
    const SpeciesParams& sp = species(s.role);
    if (s.initial_level < 0 || s.initial_level >= sp.num_levels) {
      throw InvalidArgument("initial level out of range for species " + sp.name);
    }
    if (!(s.omega_scale >= 0.0)) throw InvalidArgument("omega_scale must be >= 0");
  }
  pair_scales_.assign(num_pairs(), 1.0);
  rebuild();
}

void AtomSystem::rebuild() {
  loaded_.clear();
  hilbert_of_site_.assign(sites_.size(), -1);
  std::vector<int> dims;
  for (int i = 0; i < num_sites(); ++i) {
    if (!sites_[i].loaded) continue;
    hilbert_of_site_[i] = static_cast<int>(loaded_.size());
    loaded_.push_back(i);
    dims.push_back(species(sites_[i].role).num_levels);
  }
  space_.reset();
  if (!dims.empty()) space_.emplace(std::move(dims));
  table_ = system::interaction_table(sites_, ancilla_species_, data_species_, c6_inter_, overrides_,
                                     options_);
  for (int a = 0; a < num_sites(); ++a) {
    for (int b = a + 1; b < num_sites(); ++b) {
      const double scaled = table_(a, b) * pair_scales_[pair_index(a, b)];
      table_(a, b) = table_(b, a) = scaled;
    }
  }
}

const SpeciesParams& AtomSystem::species(Role role) const noexcept {
  return role == Role::kAncilla ? ancilla_species_ : data_species_;
}

std::vector<int> AtomSystem::data_sites() const {
  std::vector<int> out;
  for (int i = 0; i < num_sites(); ++i) {
    if (sites_[i].role == Role::kData) out.push_back(i);
  }
  return out;
}

const qcore::LevelSpace& AtomSystem::space() const {
  if (!space_) throw InvalidArgument("no loaded atoms: the system has no Hilbert space");
  return *space_;
}

int AtomSystem::hilbert_site(int system_site) const {
  if (system_site < 0 || system_site >= num_sites()) {
    throw InvalidArgument("system site out of range");
  }
  return hilbert_of_site_[system_site];
}

double AtomSystem::interaction(int a, int b) const {
  if (a == b) throw InvalidArgument("interaction: a site does not interact with itself");
  if (hilbert_site(a) < 0 || hilbert_site(b) < 0) {
    throw InvalidArgument("interaction: both sites must be loaded");
  }
  return table_(a, b);
}

int AtomSystem::pair_index(int a, int b) const {
  if (a == b || a < 0 || b < 0 || a >= num_sites() || b >= num_sites()) {
    throw InvalidArgument("pair_index: invalid pair");
  }
  if (a > b) std::swap(a, b);
  const int n = num_sites();
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

AtomSystem AtomSystem::with_loading(const std::vector<bool>& loaded) const {
  if (static_cast<int>(loaded.size()) != num_sites()) {
    throw InvalidArgument("with_loading: one flag per site expected");
  }
  AtomSystem copy = *this;
  for (int i = 0; i < num_sites(); ++i) copy.sites_[i].loaded = loaded[i];
  copy.rebuild();
  return copy;
}

AtomSystem AtomSystem::with_initial_levels(const std::vector<int>& levels) const {
  if (static_cast<int>(levels.size()) != num_sites()) {
    throw InvalidArgument("with_initial_levels: one level per site expected");
  }
  AtomSystem copy = *this;
  for (int i = 0; i < num_sites(); ++i) {
    if (levels[i] < 0 || levels[i] >= species(sites_[i].role).num_levels) {
      throw InvalidArgument("with_initial_levels: level out of range");
    }
    copy.sites_[i].initial_level = levels[i];
  }
  return copy;
}

AtomSystem AtomSystem::perturbed(const std::vector<double>& detuning_offsets_mhz,
                                 const std::vector<double>& pair_scales) const {
  if (static_cast<int>(detuning_offsets_mhz.size()) != num_sites() ||
      static_cast<int>(pair_scales.size()) != num_pairs()) {
    throw InvalidArgument("perturbed: offsets per site and scales per pair expected");
  }
  AtomSystem copy = *this;
  for (int i = 0; i < num_sites(); ++i) copy.sites_[i].detuning_offset_mhz = detuning_offsets_mhz[i];
  for (double s : pair_scales) {
    if (!(s >= 0.0)) throw InvalidArgument("perturbed: pair scale must be >= 0");
  }
  copy.pair_scales_ = pair_scales;
  copy.rebuild();
  return copy;
}

AtomSystem AtomSystem::with_omega_scales(const std::vector<double>& scales) const {
  if (static_cast<int>(scales.size()) != num_sites()) {
    throw InvalidArgument("with_omega_scales: one scale per site expected");
  }
  AtomSystem copy = *this;
  for (int i = 0; i < num_sites(); ++i) {
    if (!(scales[i] >= 0.0)) throw InvalidArgument("omega_scale must be >= 0");
    copy.sites_[i].omega_scale = scales[i];
  }
  return copy;
}

AtomSystem AtomSystem::two_atom(double v_mhz, bool data_loaded, int data_level,
                                SystemOptions options) {
  if (!(v_mhz >= 0.0)) throw InvalidArgument("two_atom: v must be >= 0");
  constexpr double kNominalDistance = 6.0;
  const double r = v_mhz > 0.0 ? vdw_distance(kC6InterNaCs, v_mhz) : kNominalDistance;
  std::vector<AtomSite> sites = {
      {Role::kAncilla, {0.0, 0.0}, true, level::kGround},
      {Role::kData, {r, 0.0}, data_loaded, data_level},
  };
  // The override pins V exactly rather than through the rounding of r^6.
  std::vector<InteractionOverride> overrides = {{0, 1, v_mhz}};
  return AtomSystem(SpeciesParams::sodium_ancilla(), SpeciesParams::cesium_data(), kC6InterNaCs,
                    std::move(sites), std::move(overrides), options);
}

AtomSystem AtomSystem::square_plaquette(double side_um, const std::vector<bool>& data_loaded,
                                        int data_level, SystemOptions options) {
  if (!(side_um > 0.0)) throw InvalidArgument("square_plaquette: side must be > 0");
  if (data_loaded.size() != 4) throw InvalidArgument("square_plaquette: four loading flags expected");
  const double h = side_um / 2.0;
  // Row-major order: top-left, top-right, bottom-left, bottom-right.
  const Position corners[4] = {{-h, h}, {h, h}, {-h, -h}, {h, -h}};
  std::vector<AtomSite> sites = {{Role::kAncilla, {0.0, 0.0}, true, level::kGround}};
  for (int i = 0; i < 4; ++i) {
    sites.push_back({Role::kData, corners[i], data_loaded[i], data_level});
  }
  return AtomSystem(SpeciesParams::sodium_ancilla(), SpeciesParams::cesium_data(), kC6InterNaCs,
                    std::move(sites), {}, options);
}

AtomSystem AtomSystem::single_atom(Role role) {
  const int lvl = role == Role::kAncilla ? level::kGround : level::kOne;
  return AtomSystem(SpeciesParams::sodium_ancilla(), SpeciesParams::cesium_data(), kC6InterNaCs,
                    {{role, {0.0, 0.0}, true, lvl}});
}

qcore::HermitianOperator build_hamiltonian(const AtomSystem& system, const DriveSettings& drive) {
  const qcore::LevelSpace& space = system.space();
  const int n = space.total_dim();
  const auto& loaded = system.loaded_sites();
  const int k = static_cast<int>(loaded.size());

  for (const SpeciesDrive* d : {&drive.ancilla, &drive.data}) {
    if (!(d->omega_mhz >= 0.0)) throw InvalidArgument("build_hamiltonian: omega must be >= 0");
  }

  struct SiteTerms {
    int stride;
    int dim;
    int coupled;
    int rydberg;
    double diag_r;          // MHz on |r><r|
    qcore::Complex coupling;  // MHz on |c><r|
  };
  std::vector<SiteTerms> terms;
  terms.reserve(k);
  for (int h = 0; h < k; ++h) {
    const AtomSite& site = system.sites()[loaded[h]];
    const SpeciesParams& sp = system.species(site.role);
    const SpeciesDrive& d = site.role == Role::kAncilla ? drive.ancilla : drive.data;
    SiteTerms t{space.stride(h), sp.num_levels, sp.coupled_level, sp.rydberg_level,
                site.detuning_offset_mhz, 0.0};
    if (d.active) {
      t.diag_r -= d.delta_mhz;
      t.coupling = 0.5 * d.omega_mhz * site.omega_scale * std::polar(1.0, d.phase_rad);
    }
    terms.push_back(t);
  }

  qcore::Matrix h_mhz = qcore::Matrix::Zero(n, n);
  std::vector<int> levels(k);
  for (int i = 0; i < n; ++i) {
    double diag = 0.0;
    for (int s = 0; s < k; ++s) {
      levels[s] = (i / terms[s].stride) % terms[s].dim;
      if (levels[s] == terms[s].rydberg) diag += terms[s].diag_r;
    }
    for (int a = 0; a < k; ++a) {
      if (levels[a] != terms[a].rydberg) continue;
      for (int b = a + 1; b < k; ++b) {
        if (levels[b] == terms[b].rydberg) diag += system.interaction_table()(loaded[a], loaded[b]);
      }
    }
    h_mhz(i, i) = diag;
    for (int s = 0; s < k; ++s) {
      if (levels[s] != terms[s].coupled || terms[s].coupling == qcore::Complex(0.0)) continue;
      const int j = i + (terms[s].rydberg - terms[s].coupled) * terms[s].stride;
      h_mhz(i, j) = terms[s].coupling;  // |c><r|
      h_mhz(j, i) = std::conj(terms[s].coupling);
    }
  }
  return qcore::HermitianOperator(space, angular(1.0) * h_mhz);
}

}  // namespace rydstab::system
