#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "neutnn/spike.hpp"

namespace neutnn {

enum class Pdk { FreePDK45, ASAP7, TNN7 };

std::string pdk_name(Pdk pdk);
Pdk pdk_from_name(const std::string& name);

/// Post-place-and-route reference data for one benchmark design:
/// leakage and die area per PDK, indexed by Pdk enum order.
/// Units: leakage mW for FreePDK45 and uW for ASAP7/TNN7; area um^2.
struct PpaBenchmark {
    std::string name;
    long long synapses = 0;
    std::array<double, 3> leakage{};
    std::array<double, 3> area{};
};

/// The embedded 12-benchmark UCR reference table.
std::span<const PpaBenchmark> ucr_ppa_table();

std::string ppa_table_to_csv();

/// Linear cost line y = slope*S + intercept with residual statistics
/// against the rows it was fit to.
struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_rel_err = 0.0;
    double mean_rel_err = 0.0;
};

/// Best linear fit under the maximum-relative-error criterion
/// (minimizes max_i |slope*x_i + intercept - y_i| / y_i). Exact for two
/// points. Throws on fewer than 2 rows or all-equal x.
LinearFit fit_linear_minmax_rel(std::span<const double> x, std::span<const double> y);

struct PpaModel {
    Pdk pdk = Pdk::TNN7;
    LinearFit leakage;
    LinearFit area;
    std::string leakage_unit;  // "mW" or "uW"
    std::string area_unit;     // "um^2"
    long long fit_min_synapses = 0;
    long long fit_max_synapses = 0;
};

/// Fits leakage and area cost lines for one PDK from the reference table.
PpaModel fit_ppa(std::span<const PpaBenchmark> table, Pdk pdk);
PpaModel fit_ppa(Pdk pdk);  // against the embedded UCR table

struct Forecast {
    double leakage = 0.0;
    double area = 0.0;
    std::string leakage_unit;
    std::string area_unit;
    bool clamped = false;       // negative prediction clamped to zero
    bool extrapolated = false;  // outside the fitted synapse range
};

Forecast forecast(const PpaModel& model, long long synapse_count);

struct PdkForecastRow {
    Pdk pdk = Pdk::TNN7;
    double leakage_uw = 0.0;  // common unit for cross-PDK comparison
    double area_um2 = 0.0;
};

/// Per-PDK forecast at one design point, sorted ascending by leakage.
std::vector<PdkForecastRow> compare_pdks(long long synapse_count);

std::string fits_to_csv(std::span<const PpaModel> models);

}  // namespace neutnn
