"use strict";

function maskToken(token) {
  return token.slice(0, 2) + "****";
}

class AuditLog {
  constructor() {
    this.entries = [];
  }

  record(event, token) {
    this.entries.push(event + " token=" + maskToken(token));
  }

  size() {
    return this.entries.length;
  }
}

module.exports = { AuditLog };
