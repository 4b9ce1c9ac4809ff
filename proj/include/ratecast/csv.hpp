#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ratecast/features.hpp"

namespace ratecast {
namespace detail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline void expect_header(std::istream& in, const std::string& want, const char* what) {
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(std::string(what) + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != want) throw std::runtime_error(std::string(what) + ": unexpected header " + line);
}

}  // namespace detail

inline constexpr const char* kDciLogHeader =
    "subframe,effective_subframe,rnti,format,direction,n_rbs,mcs,tbs,aggregation_level,cce_start";

inline void write_dci_log(std::ostream& out, const std::vector<DecodedDci>& dcis) {
    out << kDciLogHeader << '\n';
    for (const auto& d : dcis) {
        out << d.subframe << ',' << d.effective_subframe << ',' << d.dci.rnti << ','
            << format_name(d.dci.format) << ',' << (is_uplink(d.dci.format) ? "UL" : "DL") << ','
            << d.dci.n_rbs << ',' << d.dci.mcs << ',' << d.tbs << ',' << d.agg << ','
            << d.cce_start << '\n';
    }
}

inline std::vector<DecodedDci> read_dci_log(std::istream& in) {
    detail::expect_header(in, kDciLogHeader, "dci log");
    std::vector<DecodedDci> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 10) throw std::runtime_error("dci log: bad row " + line);
        DecodedDci d;
        d.subframe = std::stoull(f[0]);
        d.effective_subframe = std::stoull(f[1]);
        d.dci.rnti = static_cast<std::uint16_t>(std::stoul(f[2]));
        const auto fmt = format_from_name(f[3]);
        if (!fmt) throw std::runtime_error("dci log: bad format " + f[3]);
        d.dci.format = *fmt;
        d.dci.n_rbs = static_cast<unsigned>(std::stoul(f[5]));
        d.dci.mcs = static_cast<unsigned>(std::stoul(f[6]));
        d.tbs = static_cast<std::uint32_t>(std::stoul(f[7]));
        d.agg = static_cast<unsigned>(std::stoul(f[8]));
        d.cce_start = static_cast<unsigned>(std::stoul(f[9]));
        out.push_back(d);
    }
    return out;
}

inline constexpr const char* kNueLogHeader = "subframe,n_ue,n_ue_dl,n_ue_ul";

inline void write_nue_log(std::ostream& out, const std::vector<NUeSample>& samples) {
    out << kNueLogHeader << '\n';
    for (const auto& s : samples) {
        out << s.subframe << ',' << s.n_ue << ',' << s.n_ue_dl << ',' << s.n_ue_ul << '\n';
    }
}

inline std::vector<NUeSample> read_nue_log(std::istream& in) {
    detail::expect_header(in, kNueLogHeader, "n_ue log");
    std::vector<NUeSample> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 4) throw std::runtime_error("n_ue log: bad row " + line);
        NUeSample s;
        s.subframe = std::stoull(f[0]);
        s.n_ue = static_cast<unsigned>(std::stoul(f[1]));
        s.n_ue_dl = static_cast<unsigned>(std::stoul(f[2]));
        s.n_ue_ul = static_cast<unsigned>(std::stoul(f[3]));
        out.push_back(s);
    }
    return out;
}

inline constexpr const char* kTransfersHeader =
    "start_ms,end_ms,direction,bytes,rate_bps,rsrp_dbm,rsrq_db";

inline void write_transfers(std::ostream& out, const std::vector<DutTransfer>& transfers) {
    out << kTransfersHeader << '\n';
    for (const auto& t : transfers) {
        out << t.start_ms << ',' << t.end_ms << ',' << (t.uplink ? "UL" : "DL") << ',' << t.bytes
            << ',' << detail::fmt_double(t.rate_bps) << ',' << detail::fmt_double(t.rsrp_dbm)
            << ',' << detail::fmt_double(t.rsrq_db) << '\n';
    }
}

inline std::vector<DutTransfer> read_transfers(std::istream& in) {
    detail::expect_header(in, kTransfersHeader, "transfers");
    std::vector<DutTransfer> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 7) throw std::runtime_error("transfers: bad row " + line);
        DutTransfer t;
        t.start_ms = std::stoull(f[0]);
        t.end_ms = std::stoull(f[1]);
        if (f[2] != "UL" && f[2] != "DL") throw std::runtime_error("transfers: bad direction " + f[2]);
        t.uplink = f[2] == "UL";
        t.bytes = std::stoull(f[3]);
        t.rate_bps = std::stod(f[4]);
        t.rsrp_dbm = std::stod(f[5]);
        t.rsrq_db = std::stod(f[6]);
        out.push_back(t);
    }
    return out;
}

inline std::string features_header() {
    std::string h;
    for (const auto& n : feature_names()) {
        h += n;
        h += ',';
    }
    h += "label_rate_bps";
    return h;
}

inline void write_features(std::ostream& out, const std::vector<FeatureRow>& rows) {
    out << features_header() << '\n';
    for (const auto& r : rows) {
        for (double v : r.x) out << detail::fmt_double(v) << ',';
        out << detail::fmt_double(r.label_rate_bps) << '\n';
    }
}

inline std::vector<FeatureRow> read_features(std::istream& in) {
    detail::expect_header(in, features_header(), "features");
    std::vector<FeatureRow> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != kFeatureCount + 1) throw std::runtime_error("features: bad row " + line);
        FeatureRow r;
        for (unsigned i = 0; i < kFeatureCount; ++i) r.x[i] = std::stod(f[i]);
        r.label_rate_bps = std::stod(f[kFeatureCount]);
        out.push_back(r);
    }
    return out;
}

// Writes through a temp file so readers never observe a partial file.
template <typename Fn>
void write_file_atomic(const std::filesystem::path& path, Fn&& writer) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp.string());
        writer(out);
        if (!out) throw std::runtime_error("write failed: " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ratecast
