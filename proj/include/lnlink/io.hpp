#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "lnlink/model.hpp"
#include "lnlink/net.hpp"

namespace lnlink {

// On-disk interchange formats:
//   graph.json         gossip-dump-shaped channel graph (see README)
//   transactions.jsonl one JSON object per ledger transaction
//   asn.csv            "cidr_prefix,asn" rows
//
// Ingest locates each channel's settlement transaction as the unique spender
// of the chpoint output, computes the settlement kind from output count and
// the punishment flag, clusters entities, resolves ASNs and validates
// referential integrity. Throws Error("parse-error") with file/line context
// or Error("integrity-error") listing dangling references.
Snapshot ingest(const std::filesystem::path& graph_json,
                const std::filesystem::path& transactions_jsonl,
                const std::filesystem::path& asn_csv);

// Writers emitting byte-stable files that ingest() reads back losslessly.
void write_graph_json(const Snapshot& snap, const std::filesystem::path& path);
void write_transactions_jsonl(const Snapshot& snap, const std::filesystem::path& path);
void write_asn_csv(const Snapshot& snap, const std::filesystem::path& path);
void write_snapshot_files(const Snapshot& snap, const std::filesystem::path& dir);

AsnMap load_asn_csv(const std::filesystem::path& path);

// Run provenance: parameter map plus input checksums; hash() covers both.
struct RunManifest {
    std::string tool_version;
    std::map<std::string, std::string> inputs;      // path -> checksum
    std::map<std::string, std::string> parameters;  // flat key/value view

    void add_input(const std::filesystem::path& path);
    std::string hash() const;
    std::string to_json() const;
    void write(const std::filesystem::path& path) const;
};

std::string file_checksum(const std::filesystem::path& path);

}  // namespace lnlink
