#include "qsk/csv.hpp"

#include <cstdio>
#include <fstream>

namespace qsk {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

std::string csv_kernel(const KernelDensity& kernel, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    out += "x,density\n";
    for (int j = 0; j < kernel.grid.n(); ++j)
        out += num(kernel.grid.node(j)) + "," + num(kernel.values[j]) + "\n";
    return out;
}

std::string csv_moments(const MomentSequence& seq, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    out += "order,value\n";
    for (std::size_t i = 0; i < seq.values.size(); ++i)
        out += std::to_string(i) + "," + num(seq.values[i]) + "\n";
    return out;
}

std::string csv_weights(const MetricFit& fit, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    out += "y,w\n";
    for (std::size_t i = 0; i < fit.y.size(); ++i)
        out += num(fit.y[i]) + "," + num(fit.w[i]) + "\n";
    return out;
}

std::string csv_samples(const PathEnsemble& e, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    out += "sample\n";
    for (double x : e.terminal) out += num(x) + "\n";
    return out;
}

std::string csv_smile(const SmileSurface& s, const std::string& comment) {
    std::string out = "# " + comment + "\n";
    out += "maturity,strike,vol\n";
    for (std::size_t mi = 0; mi < s.maturities.size(); ++mi)
        for (std::size_t zi = 0; zi < s.offsets.size(); ++zi)
            out += num(s.maturities[mi]) + "," + num(s.strikes[mi][zi]) + "," +
                   num(s.vols[mi][zi]) + "\n";
    return out;
}

std::string json_ensemble_stats(const PathEnsemble& e) {
    const EnsembleStats st = ensemble_stats(e);
    std::string out = "{\n";
    out += "  \"generator\": \"" + e.generator + "\",\n";
    out += "  \"seed\": " + std::to_string(e.seed) + ",\n";
    out += "  \"samples\": " + std::to_string(e.terminal.size()) + ",\n";
    out += "  \"sigma\": " + num(e.sigma) + ",\n";
    out += "  \"epsilon\": " + num(e.epsilon) + ",\n";
    out += "  \"horizon\": " + num(e.horizon) + ",\n";
    out += "  \"mean\": " + num(st.mean) + ",\n";
    out += "  \"variance\": " + num(st.variance) + ",\n";
    out += "  \"skewness\": " + num(st.skewness) + ",\n";
    out += "  \"excess_kurtosis\": " + num(st.excess_kurtosis) + ",\n";
    out += "  \"floored_particles\": " + std::to_string(e.floored_particles) + "\n";
    out += "}\n";
    return out;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path + " for writing");
    f << content;
    if (!f) throw IoError("write failed: " + path);
}

} // namespace qsk
