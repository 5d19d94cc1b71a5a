/** First-login information window; dismissing it acknowledges the message. */

export function showInfoModal(
  container: HTMLElement,
  message: string,
  onDismiss: () => void,
): HTMLElement {
  const overlay = document.createElement('div');
  overlay.className = 'info-modal-overlay';

  const modal = document.createElement('div');
  modal.className = 'info-modal';
  modal.setAttribute('role', 'dialog');

  const text = document.createElement('p');
  text.textContent = message;

  const dismiss = document.createElement('button');
  dismiss.type = 'button';
  dismiss.className = 'info-modal-dismiss';
  dismiss.textContent = 'Got it';
  dismiss.addEventListener('click', () => {
    overlay.remove();
    onDismiss();
  });

  modal.append(text, dismiss);
  overlay.appendChild(modal);
  container.appendChild(overlay);
  return overlay;
}
