#pragma once

#include <string>

#include "cfmgml/graph.hpp"

namespace cfmgml {

// Line-delimited UTF-8 format. The first line is a header record
//   {"version":1,"num_classes":C,"vertex_variant":"label"|"attribute"[,"attr_dim":d]}
// and every following line one bag record
//   {"id":...,"labels":[...],"graphs":[{"vertices":[...],"edges":[[u,v],...]}]
//    [,"graph_labels":[...]]}
// Numbers are written in full round-trip precision, so
// read_dataset(write_dataset(ds)) == ds on every field.
//
// Throws ParseError (naming line and field) on malformed content and IoError
// on filesystem failures. Bag label sets are stored sorted ascending.
Dataset read_dataset(const std::string& path);
void write_dataset(const Dataset& ds, const std::string& path);

}  // namespace cfmgml
