"use strict";

const IDLE_LIMIT_MS = 15 * 60 * 1000;

class SessionManager {
  constructor() {
    this.lastSeen = new Map();
  }

  touch(sessionId, now) {
    this.lastSeen.set(sessionId, now);
  }

  isActive(sessionId, now) {
    const seen = this.lastSeen.get(sessionId);
    return seen !== undefined && now - seen < IDLE_LIMIT_MS;
  }
}

module.exports = { SessionManager };
