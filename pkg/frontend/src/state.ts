import type { SessionInfo, Treatment } from './types';

/**
 * Client-side session view model. The diversity level mirrors whatever the
 * server last echoed; the UI never trusts a client-side value that the
 * server has not confirmed.
 */
export class ViewModel {
  readonly token: string;
  readonly arm: string;
  readonly treatment: Treatment;
  pendingInfoMessage: string | null;
  private serverLevel: number;

  constructor(session: SessionInfo) {
    this.token = session.token;
    this.arm = session.arm;
    this.treatment = session.treatment;
    this.serverLevel = session.level;
    this.pendingInfoMessage = session.info_message;
  }

  get level(): number {
    return this.serverLevel;
  }

  get hasBroadSurface(): boolean {
    return this.treatment === 'BRC' || this.treatment === 'BRC_DS';
  }

  get hasSlider(): boolean {
    return this.treatment === 'BRC_DS';
  }

  /** Record the level confirmed by a server response. */
  confirmLevel(level: number | null | undefined): void {
    if (typeof level === 'number') {
      this.serverLevel = level;
    }
  }

  acknowledgeInfo(): void {
    this.pendingInfoMessage = null;
  }
}
