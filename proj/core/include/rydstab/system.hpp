#pragma once

// Physical model of the dual-species array: species constants, geometry,
// van der Waals interactions and rotating-frame Hamiltonian assembly.
//
// Hamiltonian convention (all terms in MHz, multiplied by 2*pi on assembly):
//
//   H/2pi = sum_sites  (Omega_s/2) (e^{i phi} |c><r| + h.c.) - Delta |r><r|
//         + sum_sites  delta_site |r><r|                    (static offsets)
//         + sum_{i<j}  V_ij |r_i r_j><r_i r_j|
//
// where |c> is the species' coupled ground level (|g> for the ancilla, |1>
// for data atoms). A neighbour in |r> therefore shifts the resonance up by V:
// the atom sees an effective detuning Delta - V. The data level |0> is never
// coupled by any drive.

#include <optional>
#include <string>
#include <vector>

#include "rydstab/qcore.hpp"

namespace rydstab::system {

enum class Role { kAncilla, kData };

namespace level {
inline constexpr int kGround = 0;          // ancilla |g>
inline constexpr int kAncillaRydberg = 1;  // ancilla |r>
inline constexpr int kZero = 0;            // data |0>
inline constexpr int kOne = 1;             // data |1>
inline constexpr int kDataRydberg = 2;     // data |r>
}  // namespace level

struct SpeciesParams {
  std::string name;
  // Same-species C6 in GHz um^6. Optional because a single-ancilla layout
  // never needs the ancilla-ancilla coefficient.
  std::optional<double> c6_intra_ghz_um6;
  int num_levels = 2;
  int coupled_level = 0;
  int rydberg_level = 1;

  // Na ancilla: {|g>, |r>}.
  static SpeciesParams sodium_ancilla();
  // Cs data qubit: {|0>, |1>, |r>}, C6 = 27.96 GHz um^6.
  static SpeciesParams cesium_data();
};

inline constexpr double kC6InterNaCs = 65.7;   // GHz um^6
inline constexpr double kC6IntraCs = 27.96;    // GHz um^6

struct Position {
  double x_um = 0.0;
  double y_um = 0.0;
};

struct AtomSite {
  Role role = Role::kData;
  Position position;
  bool loaded = true;
  int initial_level = 0;
  // Static shift of this atom's Rydberg level in MHz (quasi-static noise).
  double detuning_offset_mhz = 0.0;
  // Local drive amplitude relative to the global beam.
  double omega_scale = 1.0;
};

// A measured interaction that replaces the computed C6/r^6 value. Site
// indices refer to the order the sites were passed in.
struct InteractionOverride {
  int site_a = 0;
  int site_b = 0;
  double v_mhz = 0.0;
};

struct SystemOptions {
  bool data_data_interactions = true;
};

// 1000 * c6 / r^6: GHz um^6 and um to MHz. Throws for r <= 0.
double vdw_strength(double c6_ghz_um6, double r_um);
// Inverse of vdw_strength: the distance giving interaction v.
double vdw_distance(double c6_ghz_um6, double v_mhz);

// Rydberg-level shift of a data atom from excited neighbours on a square
// plaquette of side `side_um`.
double data_shift(int n_nearest, int n_next_nearest, double c6_ghz_um6, double side_um);

class AtomSystem {
 public:
  // Sites are reordered so that the ancilla (at most one) comes first and data
  // atoms follow in row-major geometric order (rows top to bottom, i.e.
  // decreasing y, then increasing x). Overrides are remapped accordingly.
  AtomSystem(SpeciesParams ancilla_species, SpeciesParams data_species, double c6_inter_ghz_um6,
             std::vector<AtomSite> sites, std::vector<InteractionOverride> overrides = {},
             SystemOptions options = {});

  const std::vector<AtomSite>& sites() const noexcept { return sites_; }
  int num_sites() const noexcept { return static_cast<int>(sites_.size()); }
  const SpeciesParams& species(Role role) const noexcept;
  double c6_inter() const noexcept { return c6_inter_; }
  const SystemOptions& options() const noexcept { return options_; }
  const std::vector<InteractionOverride>& overrides() const noexcept { return overrides_; }

  // Ancilla site index, or -1 if the layout has none.
  int ancilla_site() const noexcept { return ancilla_site_; }
  std::vector<int> data_sites() const;

  // Loaded atoms in Hilbert-space order. Unloaded atoms carry no factor.
  const std::vector<int>& loaded_sites() const noexcept { return loaded_; }
  bool has_hilbert_space() const noexcept { return !loaded_.empty(); }
  const qcore::LevelSpace& space() const;
  // Hilbert-space site of a system site, or -1 if unloaded.
  int hilbert_site(int system_site) const;

  // Interaction in MHz between two loaded sites (system indices).
  double interaction(int a, int b) const;
  // Full symmetric table over system sites; entries involving unloaded atoms
  // and the diagonal are zero.
  const Eigen::MatrixXd& interaction_table() const noexcept { return table_; }

  // Pair enumeration over *all* system sites (a < b, row-major), used to
  // index per-pair noise draws independently of which atoms are loaded.
  int num_pairs() const noexcept { return num_sites() * (num_sites() - 1) / 2; }
  int pair_index(int a, int b) const;

  AtomSystem with_loading(const std::vector<bool>& loaded) const;
  AtomSystem with_initial_levels(const std::vector<int>& levels) const;
  // Offsets per system site; pair scales per pair_index.
  AtomSystem perturbed(const std::vector<double>& detuning_offsets_mhz,
                       const std::vector<double>& pair_scales) const;
  AtomSystem with_omega_scales(const std::vector<double>& scales) const;

  // Ancilla plus one data atom at the distance that produces v_mhz. v = 0 is
  // realised through an override at a nominal distance.
  static AtomSystem two_atom(double v_mhz, bool data_loaded = true, int data_level = level::kOne,
                             SystemOptions options = {});
  // Ancilla at the centre of a square of data atoms with side `side_um`.
  static AtomSystem square_plaquette(double side_um, const std::vector<bool>& data_loaded,
                                     int data_level = level::kOne, SystemOptions options = {});
  // Data atom alone (for Rabi calibrations of the data species).
  static AtomSystem single_atom(Role role);

 private:
  void rebuild();

  SpeciesParams ancilla_species_;
  SpeciesParams data_species_;
  double c6_inter_;
  std::vector<AtomSite> sites_;
  std::vector<InteractionOverride> overrides_;  // in sorted site indices
  std::vector<double> pair_scales_;
  SystemOptions options_;

  int ancilla_site_ = -1;
  std::vector<int> loaded_;
  std::vector<int> hilbert_of_site_;
  std::optional<qcore::LevelSpace> space_;
  Eigen::MatrixXd table_;
};

// Computes the pairwise interaction table (MHz) for the given sites.
Eigen::MatrixXd interaction_table(const std::vector<AtomSite>& sites,
                                  const SpeciesParams& ancilla_species,
                                  const SpeciesParams& data_species, double c6_inter_ghz_um6,
                                  const std::vector<InteractionOverride>& overrides,
                                  const SystemOptions& options);

struct SpeciesDrive {
  double omega_mhz = 0.0;
  double delta_mhz = 0.0;
  double phase_rad = 0.0;
  bool active = false;
};

struct DriveSettings {
  SpeciesDrive ancilla;
  SpeciesDrive data;
};

// Rotating-frame Hamiltonian in rad/us over the loaded atoms.
qcore::HermitianOperator build_hamiltonian(const AtomSystem& system, const DriveSettings& drive);

}  // namespace rydstab::system
