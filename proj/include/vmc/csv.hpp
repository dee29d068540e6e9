#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "vmc/extended_balayage.hpp"
#include "vmc/rational.hpp"
#include "vmc/smc.hpp"
#include "vmc/vmcsim.hpp"
#include "vmc/zolaw.hpp"

namespace vmc {

// CSV emitters. Exact values ride as "p/q"; each rational column repeats as a
// 12-significant-digit decimal for plotting.

inline std::string sternfeld_csv(const std::vector<SternfeldStatistic>& stats) {
    std::ostringstream out;
    out << "M,c,N,a,sum,target,abs_dev,sum_decimal,target_decimal,abs_dev_decimal\n";
    for (const SternfeldStatistic& st : stats)
        for (const SternfeldRow& row : st.rows)
            out << st.m_level << ',' << st.state << ',' << st.n_level << ',' << row.a << ','
                << to_fraction_string(row.sum) << ',' << to_fraction_string(row.target) << ','
                << to_fraction_string(row.abs_dev) << ',' << to_decimal_string(row.sum) << ','
                << to_decimal_string(row.target) << ',' << to_decimal_string(row.abs_dev) << '\n';
    return out.str();
}

inline std::string k0_csv(int n_level, int a_lo, const std::vector<Rational>& values) {
    std::ostringstream out;
    out << "N,a,value,value_decimal\n";
    for (std::size_t i = 0; i < values.size(); ++i)
        out << n_level << ',' << a_lo + static_cast<int>(i) << ',' << to_fraction_string(values[i]) << ','
            << to_decimal_string(values[i]) << '\n';
    return out.str();
}

inline std::string classification_csv(const std::vector<StateClassification>& rows) {
    std::ostringstream out;
    out << "a,q,p,verdict,q_decimal,p_decimal\n";
    for (const StateClassification& c : rows)
        out << c.a << ',' << to_fraction_string(c.q) << ',' << to_fraction_string(c.p) << ','
            << to_string(c.verdict) << ',' << to_decimal_string(c.q) << ',' << to_decimal_string(c.p) << '\n';
    return out.str();
}

inline std::string staircase_samples_csv(const std::vector<StaircasePrefix>& samples) {
    std::ostringstream out;
    if (samples.empty()) return "replicate\n";
    out << "replicate";
    for (int n = 0; n <= samples.front().top_level(); ++n) out << ",s" << n;
    out << '\n';
    for (std::size_t r = 0; r < samples.size(); ++r) {
        out << r;
        for (int s : samples[r].states) out << ',' << s;
        out << '\n';
    }
    return out.str();
}

inline std::string tail_second_moment_csv(const std::vector<TailSecondMomentCell>& cells) {
    std::ostringstream out;
    out << "M,c,N,defect,defect_decimal\n";
    for (const TailSecondMomentCell& cell : cells)
        for (const auto& [n, defect] : cell.defect_by_level)
            out << cell.m_level << ',' << cell.state << ',' << n << ',' << to_fraction_string(defect) << ','
                << to_decimal_string(defect) << '\n';
    return out.str();
}

}  // namespace vmc
