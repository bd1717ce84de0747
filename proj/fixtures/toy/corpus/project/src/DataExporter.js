"use strict";

const PRIVATE_FIELDS = ["email", "phone"];

class DataExporter {
  exportPublic(record) {
    const out = {};
    for (const key of Object.keys(record)) {
      if (!PRIVATE_FIELDS.includes(key)) {
        out[key] = record[key];
      }
    }
    return out;
  }
}

module.exports = { DataExporter };
