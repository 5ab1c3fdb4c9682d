#include "neutnn/ppa.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace neutnn {

namespace {

// Leakage: mW for FreePDK45, uW for ASAP7/TNN7. Area: um^2.
const std::vector<PpaBenchmark> kUcrTable = {
    {"SonyAIBORobotSurface2", 130, {0.32, 0.94, 0.74}, {15156.68, 997.13, 830.54}},
    {"ECG200", 192, {0.45, 1.39, 1.06}, {21884.31, 1462.53, 1200.73}},
    {"Wafer", 304, {0.73, 2.21, 1.68}, {34769.06, 2402.54, 1919.28}},
    {"TwoPattern", 512, {1.22, 3.79, 2.85}, {58558.41, 4046.38, 3232.47}},
    {"Coffee", 572, {1.33, 4.22, 3.25}, {65420.72, 4520.56, 3611.28}},
    {"ToeSegmentation2", 686, {1.66, 4.92, 3.79}, {74064.40, 5344.52, 4426.00}},
    {"Plane", 1008, {2.44, 7.32, 5.56}, {108829.33, 7853.17, 6503.51}},
    {"Lightning2", 1274, {2.93, 9.08, 6.99}, {138006.45, 10419.41, 8385.73}},
    {"Meat", 1344, {3.02, 9.57, 7.42}, {145589.22, 10991.91, 8846.49}},
    {"Beef", 2350, {5.79, 16.12, 12.54}, {262614.44, 18178.67, 15281.87}},
    {"OSULeaf", 2562, {6.31, 17.57, 13.67}, {286305.61, 19818.62, 16660.49}},
    {"WordSynonyms", 6750, {19.8, 49.37, 40.27}, {870555.73, 54856.83, 49478.29}},
};

void fill_residuals(LinearFit& fit, std::span<const double> x, std::span<const double> y) {
    double worst = 0.0, sum = 0.0;
    for (size_t i = 0; i < x.size(); ++i) {
        const double rel = std::abs(fit.slope * x[i] + fit.intercept - y[i]) / y[i];
        worst = std::max(worst, rel);
        sum += rel;
    }
    fit.max_rel_err = worst;
    fit.mean_rel_err = sum / double(x.size());
}

double worst_rel(double a, double b, std::span<const double> x, std::span<const double> y) {
    double worst = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        worst = std::max(worst, std::abs(a * x[i] + b - y[i]) / y[i]);
    return worst;
}

}  // namespace

std::string pdk_name(Pdk pdk) {
    switch (pdk) {
        case Pdk::FreePDK45: return "FreePDK45";
        case Pdk::ASAP7: return "ASAP7";
        case Pdk::TNN7: return "TNN7";
    }
    return "?";
}

Pdk pdk_from_name(const std::string& name) {
    if (name == "FreePDK45") return Pdk::FreePDK45;
    if (name == "ASAP7") return Pdk::ASAP7;
    if (name == "TNN7") return Pdk::TNN7;
    throw Error("unknown PDK '" + name + "' (valid: FreePDK45, ASAP7, TNN7)");
}

std::span<const PpaBenchmark> ucr_ppa_table() { return kUcrTable; }

std::string ppa_table_to_csv() {
    std::ostringstream csv;
    csv.precision(10);  // table values are exact to two decimals
    csv << "benchmark,synapses,leakage_FreePDK45_mW,leakage_ASAP7_uW,leakage_TNN7_uW,"
           "area_FreePDK45_um2,area_ASAP7_um2,area_TNN7_um2\n";
    for (const auto& row : kUcrTable) {
        csv << row.name << "," << row.synapses;
        for (double v : row.leakage) csv << "," << v;
        for (double v : row.area) csv << "," << v;
        csv << "\n";
    }
    return csv.str();
}

LinearFit fit_linear_minmax_rel(std::span<const double> x, std::span<const double> y) {
    const size_t n = x.size();
    if (n < 2 || y.size() != n) throw Error("fit: need at least 2 rows");
    bool degenerate = true;
    for (size_t i = 1; i < n; ++i)
        if (x[i] != x[0]) degenerate = false;
    if (degenerate) throw Error("fit: all synapse counts equal");

    LinearFit best;
    best.max_rel_err = std::numeric_limits<double>::infinity();

    // Exact interpolation candidates through every point pair.
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            if (x[i] == x[j]) continue;
            const double a = (y[j] - y[i]) / (x[j] - x[i]);
            const double b = y[i] - a * x[i];
            const double t = worst_rel(a, b, x, y);
            if (t < best.max_rel_err) best = {a, b, t, 0.0};
        }
    }
    // Equioscillation candidates: three points with alternating signed
    // relative deviation (s, -s, s). Solve a*x_k + b - y_k = s_k*t*y_k.
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            for (size_t k = j + 1; k < n; ++k) {
                for (int sgn : {+1, -1}) {
                    const double s[3] = {double(sgn), double(-sgn), double(sgn)};
                    const double xs[3] = {x[i], x[j], x[k]};
                    const double ys[3] = {y[i], y[j], y[k]};
                    // Unknowns (a, b, t); rows: a*xs + b - s*ys*t = ys
                    double m[3][4];
                    for (int r = 0; r < 3; ++r) {
                        m[r][0] = xs[r];
                        m[r][1] = 1.0;
                        m[r][2] = -s[r] * ys[r];
                        m[r][3] = ys[r];
                    }
                    // Gaussian elimination, 3x3
                    bool singular = false;
                    for (int c = 0; c < 3 && !singular; ++c) {
                        int piv = c;
                        for (int r = c + 1; r < 3; ++r)
                            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
                        if (std::abs(m[piv][c]) < 1e-12) {
                            singular = true;
                            break;
                        }
                        std::swap(m[c], m[piv]);
                        for (int r = 0; r < 3; ++r) {
                            if (r == c) continue;
                            const double f = m[r][c] / m[c][c];
                            for (int cc = c; cc < 4; ++cc) m[r][cc] -= f * m[c][cc];
                        }
                    }
                    if (singular) continue;
                    const double a = m[0][3] / m[0][0];
                    const double b = m[1][3] / m[1][1];
                    const double t = m[2][3] / m[2][2];
                    if (!(t >= 0.0)) continue;
                    const double worst = worst_rel(a, b, x, y);
                    if (worst < best.max_rel_err) best = {a, b, worst, 0.0};
                }
            }
        }
    }
    fill_residuals(best, x, y);
    return best;
}

PpaModel fit_ppa(std::span<const PpaBenchmark> table, Pdk pdk) {
    if (table.size() < 2) throw Error("fit_ppa: need at least 2 rows");
    const size_t p = size_t(pdk);
    std::vector<double> x, leak, area;
    long long lo = table[0].synapses, hi = table[0].synapses;
    for (const auto& row : table) {
        x.push_back(double(row.synapses));
        leak.push_back(row.leakage[p]);
        area.push_back(row.area[p]);
        lo = std::min(lo, row.synapses);
        hi = std::max(hi, row.synapses);
    }
    PpaModel model;
    model.pdk = pdk;
    model.leakage = fit_linear_minmax_rel(x, leak);
    model.area = fit_linear_minmax_rel(x, area);
    model.leakage_unit = pdk == Pdk::FreePDK45 ? "mW" : "uW";
    model.area_unit = "um^2";
    model.fit_min_synapses = lo;
    model.fit_max_synapses = hi;
    return model;
}

PpaModel fit_ppa(Pdk pdk) { return fit_ppa(ucr_ppa_table(), pdk); }

Forecast forecast(const PpaModel& model, long long synapse_count) {
    if (synapse_count < 0) throw Error("forecast: synapse_count must be >= 0");
    Forecast f;
    f.leakage = model.leakage.slope * double(synapse_count) + model.leakage.intercept;
    f.area = model.area.slope * double(synapse_count) + model.area.intercept;
    if (f.leakage < 0.0 || f.area < 0.0) {
        f.leakage = std::max(0.0, f.leakage);
        f.area = std::max(0.0, f.area);
        f.clamped = true;
    }
    f.leakage_unit = model.leakage_unit;
    f.area_unit = model.area_unit;
    f.extrapolated =
        synapse_count < model.fit_min_synapses || synapse_count > model.fit_max_synapses;
    return f;
}

std::vector<PdkForecastRow> compare_pdks(long long synapse_count) {
    std::vector<PdkForecastRow> rows;
    for (Pdk pdk : {Pdk::FreePDK45, Pdk::ASAP7, Pdk::TNN7}) {
        const Forecast f = forecast(fit_ppa(pdk), synapse_count);
        PdkForecastRow row;
        row.pdk = pdk;
        row.leakage_uw = pdk == Pdk::FreePDK45 ? f.leakage * 1000.0 : f.leakage;
        row.area_um2 = f.area;
        rows.push_back(row);
    }
    std::sort(rows.begin(), rows.end(),
              [](const PdkForecastRow& a, const PdkForecastRow& b) {
                  return a.leakage_uw < b.leakage_uw;
              });
    return rows;
}

std::string fits_to_csv(std::span<const PpaModel> models) {
    std::ostringstream csv;
    csv << "pdk,metric,unit,slope,intercept,max_rel_err,mean_rel_err\n";
    for (const auto& m : models) {
        csv << pdk_name(m.pdk) << ",leakage," << m.leakage_unit << "," << m.leakage.slope << ","
            << m.leakage.intercept << "," << m.leakage.max_rel_err << "," << m.leakage.mean_rel_err
            << "\n";
        csv << pdk_name(m.pdk) << ",area," << m.area_unit << "," << m.area.slope << ","
            << m.area.intercept << "," << m.area.max_rel_err << "," << m.area.mean_rel_err << "\n";
    }
    return csv.str();
}

}  // namespace neutnn
