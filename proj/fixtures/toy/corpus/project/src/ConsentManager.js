"use strict";

class ConsentManager {
  constructor() {
    this.grants = new Map();
  }

  grant(userId, scope) {
    if (!this.grants.has(userId)) {
      this.grants.set(userId, new Set());
    }
    this.grants.get(userId).add(scope);
  }

  revoke(userId, scope) {
    const scopes = this.grants.get(userId);
    if (scopes !== undefined) {
      scopes.delete(scope);
    }
  }

  canShare(userId, scope) {
    const scopes = this.grants.get(userId);
    return scopes !== undefined && scopes.has(scope);
  }
}

module.exports = { ConsentManager };
