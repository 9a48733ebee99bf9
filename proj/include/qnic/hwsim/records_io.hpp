#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qnic/core/format.hpp"
#include "qnic/hwsim/hwsim.hpp"

namespace qnic {

/// Column contract for persisted Tx/Rx records. rx_* is the phase-corrected sample;
/// symbol and raw_* follow so that a record pair round-trips exactly.
inline constexpr const char* kRecordColumns = "index,frame,is_ref,sent_re,sent_im,rx_re,rx_im,accepted,symbol,raw_re,raw_im";

inline void write_records(std::ostream& os, const TxRecord& tx, const RxRecord& rx, nlohmann::json header) {
    if (tx.size() != rx.size()) throw DomainError("write_records: Tx/Rx size mismatch");
    header["columns"] = kRecordColumns;
    header["frame_len"] = tx.cfg.frame_len;
    header["n_ref"] = tx.cfg.n_ref;
    header["ref_amplitude_scale"] = tx.cfg.ref_amplitude_scale;
    header["jitter_rel"] = tx.jitter_rel;
    header["tx_seed"] = tx.seed;
    header["survival_fraction"] = rx.survival_fraction;
    os << "# " << header.dump() << '\n' << kRecordColumns << '\n';
    for (std::size_t i = 0; i < tx.size(); ++i) {
        os << i << ',' << tx.frame[i] << ',' << int(tx.is_ref[i]) << ',' << format_double(tx.symbols[i].amplitude.real())
           << ',' << format_double(tx.symbols[i].amplitude.imag()) << ',' << format_double(rx.corrected[i].real()) << ','
           << format_double(rx.corrected[i].imag()) << ',' << int(rx.accepted[i]) << ',' << tx.symbols[i].index << ','
           << format_double(rx.raw[i].real()) << ',' << format_double(rx.raw[i].imag()) << '\n';
    }
}

struct RecordBundle {
    nlohmann::json header;
    TxRecord tx;
    RxRecord rx;
};

inline RecordBundle read_records(std::istream& is) {
    RecordBundle b;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw ConfigError("records: missing JSON header line");
    b.header = nlohmann::json::parse(line.substr(2));
    if (!std::getline(is, line) || line != kRecordColumns) throw ConfigError("records: unexpected column header");
    b.tx.cfg.frame_len = b.header.at("frame_len").get<int>();
    b.tx.cfg.n_ref = b.header.at("n_ref").get<int>();
    b.tx.cfg.ref_amplitude_scale = b.header.at("ref_amplitude_scale").get<double>();
    b.tx.jitter_rel = b.header.at("jitter_rel").get<double>();
    b.tx.seed = b.header.at("tx_seed").get<std::uint64_t>();
    b.rx.survival_fraction = b.header.at("survival_fraction").get<double>();
    std::size_t lineno = 2;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string_view> f;
        std::string_view sv(line);
        for (std::size_t pos = 0;;) {
            const std::size_t c = sv.find(',', pos);
            f.push_back(sv.substr(pos, c == std::string_view::npos ? std::string_view::npos : c - pos));
            if (c == std::string_view::npos) break;
            pos = c + 1;
        }
        if (f.size() != 11) throw ConfigError("records: line " + std::to_string(lineno) + " has wrong field count");
        b.tx.frame.push_back(static_cast<std::uint32_t>(parse_u64(f[1])));
        b.tx.is_ref.push_back(static_cast<std::uint8_t>(parse_u64(f[2])));
        b.tx.symbols.push_back({{parse_double(f[3]), parse_double(f[4])}, static_cast<int>(parse_u64(f[8]))});
        b.rx.corrected.push_back({parse_double(f[5]), parse_double(f[6])});
        b.rx.accepted.push_back(static_cast<std::uint8_t>(parse_u64(f[7])));
        b.rx.raw.push_back({parse_double(f[9]), parse_double(f[10])});
    }
    return b;
}

} // namespace qnic
