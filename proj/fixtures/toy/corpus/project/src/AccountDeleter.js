"use strict";

class AccountDeleter {
  constructor(store) {
    this.store = store;
  }

  deleteAccount(userId) {
    if (!this.store.has(userId)) {
      return false;
    }
    this.store.delete(userId);
    return true;
  }

  purgeBackups(backups, userId) {
    return backups.filter((b) => b.userId !== userId);
  }
}

module.exports = { AccountDeleter };
