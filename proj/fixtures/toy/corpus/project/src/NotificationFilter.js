"use strict";

class NotificationFilter {
  constructor(blockedSenders) {
    this.blocked = new Set(blockedSenders);
  }

  shouldDeliver(notification) {
    return !this.blocked.has(notification.sender);
  }
}

module.exports = { NotificationFilter };
